from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roundforge import errors
from roundforge.digraph import double, is_isomorphic, rank_normalize, validate
from roundforge.embed import (
    digraph_from_embedding,
    embed_height_planar,
    embed_symmetric,
    feature_gap,
    validate_embedding,
)
from roundforge.errors import RoundforgeError
from roundforge.generate import random_digraph

from conftest import BANANA, BANANA_MIN, MINIMAL, SEGMENT, doc


def k33_subdivision_doc():
    """Valid digraph whose underlying graph contains a K33 subdivision.

    Each fan vertex u_i reaches all three merge columns (A directly, B and C
    through a second split x_i), so no planar embedding exists at all.
    """
    verts = [("b1", 0), ("b2", 1), ("b3", 2),
             ("u1", 3), ("u2", 4), ("u3", 5),
             ("x1", 6), ("x2", 7), ("x3", 8)]
    edges = [("b1", "u1"), ("b2", "u2"), ("b3", "u3"),
             ("u1", "x1"), ("u2", "x2"), ("u3", "x3")]
    h = 9.0
    for col, feeders in (("A", ["u1", "u2", "u3"]), ("B", ["x1", "x2", "x3"]),
                         ("C", ["x1", "x2", "x3"])):
        verts += [(f"m{col}1", h), (f"m{col}2", h + 1), (f"z{col}", h + 2)]
        h += 3
        edges += [(feeders[0], f"m{col}1"), (feeders[1], f"m{col}1"),
                  (f"m{col}1", f"m{col}2"), (feeders[2], f"m{col}2"),
                  (f"m{col}2", f"z{col}")]
    return doc(verts, edges)


class TestPlainEmbedding:
    def test_segment_is_straight_on_axis(self):
        g = rank_normalize(validate(SEGMENT), start=1.0)
        e = embed_height_planar(g)
        path = e.edge_paths["e0"]
        assert np.allclose(path[:, 1], 0.0)
        assert e.positions["a"] == (1.0, 0.0)
        assert validate_embedding(e)["ok"]

    def test_banana_two_arcs(self):
        g = rank_normalize(validate(BANANA), start=1.0)
        e = embed_height_planar(g)
        rep = validate_embedding(e)
        assert rep["ok"], rep["issues"]
        # the two parallel strands occupy distinct channels
        p1, p2 = e.edge_paths["e1"], e.edge_paths["e2"]
        assert p1[1, 1] != p2[1, 1]

    def test_round_trip_isomorphic(self, rng):
        for _ in range(25):
            g = rank_normalize(random_digraph(rng), start=1.0)
            e = embed_height_planar(g)
            assert validate_embedding(e)["ok"]
            back = digraph_from_embedding(e)
            assert is_isomorphic(g, back) is not None

    def test_projection_equals_height_exactly(self, rng):
        g = rank_normalize(random_digraph(rng, saddles=4), start=1.0)
        e = embed_height_planar(g)
        heights = g.heights()
        for v, (s, _) in e.positions.items():
            assert s - heights[v] == 0.0

    def test_k33_subdivision_not_height_planar(self):
        g = validate(k33_subdivision_doc())
        assert g.is_realizable()
        with pytest.raises(RoundforgeError) as ei:
            embed_height_planar(g)
        assert ei.value.code == errors.NOT_HEIGHT_PLANAR

    def test_minimal_set_rejected(self):
        with pytest.raises(RoundforgeError):
            embed_height_planar(validate(MINIMAL))


class TestSymmetricEmbedding:
    def test_minimal_double_segment(self):
        d = double(rank_normalize(validate(MINIMAL)))
        e = embed_symmetric(d)
        assert e.symmetric
        path = e.edge_paths[list(d.axis_edges)[0]]
        assert np.allclose(path[:, 1], 0.0)
        assert path[0, 0] == -1.0 and path[-1, 0] == 1.0
        rep = validate_embedding(e)
        assert rep["ok"], rep["issues"]

    def test_banana_double_theta(self):
        d = double(rank_normalize(validate(BANANA_MIN)))
        e = embed_symmetric(d)
        rep = validate_embedding(e)
        assert rep["ok"], rep["issues"]
        assert len(e.axis_ports) == 1

    def test_reflection_extracts_negated_double(self, rng):
        for _ in range(10):
            g = rank_normalize(random_digraph(rng, minimal=int(rng.integers(1, 4))))
            d = double(g)
            e = embed_symmetric(d)
            rep = validate_embedding(e)
            assert rep["ok"], rep["issues"]
            back = digraph_from_embedding(e)
            assert is_isomorphic(d, back) is not None

    def test_non_double_rejected(self):
        g = validate(SEGMENT)
        with pytest.raises(RoundforgeError) as ei:
            embed_symmetric(g)
        assert ei.value.code == errors.NOT_A_DOUBLE


class TestFeatureGap:
    def test_single_edge_gap_default(self):
        g = rank_normalize(validate(SEGMENT), start=1.0)
        assert feature_gap(embed_height_planar(g)) == 1.0

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_gap_positive(self, seed):
        g = rank_normalize(random_digraph(np.random.default_rng(seed)), start=1.0)
        e = embed_height_planar(g)
        assert feature_gap(e) > 0.25
