"""roundforge: compile a height-labeled digraph into an explicit real
polynomial whose zero set is a smooth closed manifold carrying the prescribed
fold structure, then certify every claimed property numerically."""

__version__ = "0.1.0"

from roundforge.digraph import (  # noqa: F401
    Edge,
    HeightDigraph,
    SMDigraph,
    TopologyDescriptor,
    betti1,
    double,
    expected_topology,
    is_isomorphic,
    validate,
)
