from __future__ import annotations

import numpy as np
import pytest


def doc(verts, edges, minimal=()):
    """Compact digraph document builder: verts = [(id, h)], edges = [(tail, head)]."""
    return {
        "vertices": [{"id": v, "height": h} for v, h in verts],
        "edges": [{"tail": t, "head": h, "id": f"e{i}"} for i, (t, h) in enumerate(edges)],
        "minimal_set": list(minimal),
    }


MINIMAL = doc([("b", 0.0), ("t", 1.0)], [("b", "t")], minimal=["b"])
SEGMENT = doc([("a", 0.0), ("z", 1.0)], [("a", "z")])
BANANA = doc(
    [("a", 0.0), ("v1", 1.0), ("v2", 2.0), ("z", 3.0)],
    [("a", "v1"), ("v1", "v2"), ("v1", "v2"), ("v2", "z")],
)
BANANA_MIN = doc(
    [("a", 0.0), ("v1", 1.0), ("v2", 2.0), ("z", 3.0)],
    [("a", "v1"), ("v1", "v2"), ("v1", "v2"), ("v2", "z")],
    minimal=["a"],
)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
