"""Tunable tolerances and job configuration.

Defaults follow the tool's calibration: unit-spaced embedding levels, tube
radius a fixed fraction of the feature gap, fit degrees stepping 4..12, and
verifier floors comfortably above fit accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


@dataclass(frozen=True)
class Tolerances:
    # tubular neighborhood
    delta_factor: float = 0.2          # tube radius as fraction of min feature gap
    grid_per_delta: int = 64           # grid nodes per tube radius
    smooth_passes: int = 5             # curve smoothing iterations after marching
    resample_spacing_factor: float = 0.125  # sample spacing as fraction of delta
    tangency_sep: float = 1e-2         # target separation of tangency s-values
    # fitting
    fit_degrees: tuple[int, ...] = (4, 6, 8, 10, 12)
    fit_lambda: float = 0.1
    fit_residual_max: float = 1e-6
    hausdorff_rel_max: float = 0.02    # fraction of curve diameter
    grad_floor: float = 1e-3
    remediate_rounds: int = 4
    # verifier
    newton_tol: float = 1e-12
    seed_grid: int = 256
    radius_margin: float = 1e-3
    nondegeneracy_floor: float = 1e-6
    axis_transversal_floor: float = 1e-3
    smoothness_samples: int = 120_000
    # expansion
    term_cap: int = 200_000


@dataclass
class JobConfig:
    m: int = 5
    mode: str = "cylinder"             # cylinder | disk | disk-circles
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    expand: bool = True
    out_dir: str = "."

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tolerances"]["fit_degrees"] = list(self.tolerances.fit_degrees)
        return d


MODES = ("cylinder", "disk", "disk-circles")
