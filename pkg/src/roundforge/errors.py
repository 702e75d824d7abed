"""Error types shared across the pipeline.

Every failure carries a stable machine-readable ``code`` and the pipeline
``stage`` that raised it; the CLI serializes both, and the admissibility
tests compare codes against golden files.
"""

from __future__ import annotations


class RoundforgeError(Exception):
    """Base error with a stable code and the stage that raised it."""

    def __init__(self, code: str, message: str, stage: str = "", details: object = None):
        super().__init__(message)
        self.code = code
        self.stage = stage
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "stage": self.stage, "message": str(self)}
        if self.details is not None:
            out["details"] = self.details
        return out


class ValidationError(RoundforgeError):
    """Digraph document violates an invariant; details holds all violations."""


class SchemaError(RoundforgeError):
    """Malformed JSON document (unknown field, wrong type, missing key)."""


# Digraph validation
DEGREE_VIOLATION = "DegreeViolation"
DUPLICATE_HEIGHT = "DuplicateHeight"
MINIMAL_SET_VIOLATION = "MinimalSetViolation"
DISCONNECTED = "Disconnected"
EDGE_NOT_INCREASING = "EdgeNotIncreasing"
SELF_LOOP = "SelfLoop"
EXTREMUM_DEGREE = "ExtremumDegree"
UNKNOWN_VERTEX = "UnknownVertex"
EMPTY_GRAPH = "EmptyGraph"

# Admissibility / pipeline gates
NOT_REALIZABLE = "NotRealizable"
AMBIGUOUS_4D = "Ambiguous4d"
MODE_MISMATCH = "ModeMismatch"
EMPTY_MINIMAL_SET = "EmptyMinimalSet"
F0_NOT_CONNECTED = "F0NotConnected"
DIMENSION_TOO_LOW = "DimensionTooLow"

# Embedding
NOT_HEIGHT_PLANAR = "NotHeightPlanar"
NOT_A_DOUBLE = "NotADouble"

# Tubular curves
DELTA_TOO_LARGE = "DeltaTooLarge"
COMPONENT_COUNT_MISMATCH = "ComponentCountMismatch"
OPEN_CONTOUR = "OpenContour"
PERTURBATION_BUDGET = "PerturbationBudgetExceeded"
AXIS_CROSSING_COUNT = "AxisCrossingCount"
ASYMMETRIC_SYSTEM = "AsymmetricSystem"
NO_FEASIBLE_RADIUS = "NoFeasibleRadius"
NOT_CAP_SHAPED = "NotCapShaped"

# Fitting
DEGREE_TOO_LOW = "DegreeTooLow"
DEGREE_CAP_EXCEEDED = "DegreeCapExceeded"
DEGENERATE_NORMALS = "DegenerateNormals"
SIGN_UNDEFINED = "SignUndefined"

# Assembly / lift
INTERSECTING_FACTORS = "IntersectingFactors"
WITNESS_NOT_POSITIVE = "WitnessNotPositive"
TERM_CAP_EXCEEDED = "TermCapExceeded"
LIFT_PRECONDITION = "LiftPrecondition"

# Verification
EMPTY_MANIFOLD = "EmptyManifold"
SWEEP_AMBIGUOUS = "SweepAmbiguous"

# I/O
UNKNOWN_FIELD = "UnknownField"
BAD_DOCUMENT = "BadDocument"
IO_ERROR = "IoError"
