from __future__ import annotations

import numpy as np
import pytest

from roundforge import errors
from roundforge.config import Tolerances
from roundforge.curves import (
    ClosedCurve,
    CurveSystem,
    boundary_curves,
    circle_replace,
    classify,
    enforce_simple_morse,
    extract_tangencies,
    point_in_polygon,
)
from roundforge.digraph import double, rank_normalize, validate
from roundforge.embed import embed_height_planar, embed_symmetric, feature_gap
from roundforge.errors import RoundforgeError
from roundforge._core import directed_hausdorff

from conftest import BANANA, BANANA_MIN, MINIMAL, SEGMENT, doc

TOL = Tolerances()


def ellipse(cx, cy, a, b, n=600):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.column_stack([cx + a * np.cos(th), cy + b * np.sin(th)])


def cylinder_system(d):
    g = rank_normalize(validate(d), start=1.0)
    e = embed_height_planar(g)
    gap = feature_gap(e)
    return e, boundary_curves(e, TOL.delta_factor * gap, TOL, gap=gap)


def disk_system(d):
    g = rank_normalize(validate(d))
    dd = double(g)
    e = embed_symmetric(dd)
    gap = feature_gap(e)
    return dd, e, boundary_curves(e, TOL.delta_factor * gap, TOL, gap=gap)


class TestBoundaryCurves:
    def test_segment_single_oval(self):
        e, cs = cylinder_system(SEGMENT)
        assert len(cs.curves) == 1
        c = cs.curves[0]
        assert len(c.tangencies) == 2
        kinds = sorted(tg.kind for tg in c.tangencies)
        assert kinds == ["left", "right"]
        svals = sorted(c.tangency_values())
        assert abs(svals[0] - (1.0 - cs.delta)) < 0.02
        assert abs(svals[1] - (2.0 + cs.delta)) < 0.02

    def test_banana_two_curves_nested(self):
        e, cs = cylinder_system(BANANA)
        assert len(cs.curves) == 2
        outer, inner = cs.curves
        # hole curve lies inside the outer boundary
        assert point_in_polygon(inner.points[0], outer.closed_points())
        # one tangency per digraph vertex in total
        assert len(outer.tangencies) + len(inner.tangencies) == 4

    def test_curves_hug_the_graph(self):
        e, cs = cylinder_system(BANANA)
        dense = []
        for path in e.edge_paths.values():
            for i in range(len(path) - 1):
                for w in np.linspace(0, 1, 40):
                    dense.append(path[i] * (1 - w) + path[i + 1] * w)
        graph_pts = np.array(dense)
        for c in cs.curves:
            assert directed_hausdorff(c.points, graph_pts) <= 2 * cs.delta
        # every graph point is inside the outer curve
        outer = cs.curves[0].closed_points()
        for p in graph_pts[:: max(1, len(graph_pts) // 50)]:
            assert point_in_polygon(p, outer)

    def test_delta_too_large(self):
        g = rank_normalize(validate(BANANA), start=1.0)
        e = embed_height_planar(g)
        gap = feature_gap(e)
        with pytest.raises(RoundforgeError) as ei:
            boundary_curves(e, 0.75 * gap, TOL, gap=gap)
        assert ei.value.code == errors.DELTA_TOO_LARGE

    def test_delta_beyond_strand_gap_merges_components(self):
        # bypass the gap precondition: the contour around both strands merges
        # into one component, so the b1+1 count check fires
        g = rank_normalize(validate(BANANA), start=1.0)
        e = embed_height_planar(g)
        with pytest.raises(RoundforgeError) as ei:
            boundary_curves(e, 0.6, Tolerances(grid_per_delta=32), gap=np.inf)
        assert ei.value.code == errors.COMPONENT_COUNT_MISMATCH
        assert ei.value.details["found"] == 1

    def test_doubled_segment_axis_oval(self):
        dd, e, cs = disk_system(MINIMAL)
        assert len(cs.curves) == 1
        cs = classify(cs)
        assert cs.curves[0].cls == "axis-crossing"
        svals = sorted(cs.curves[0].tangency_values())
        assert abs(svals[0] + svals[1]) < 0.01  # mirror symmetric

    def test_doubled_banana_one_axis_plus_pair(self):
        dd, e, cs = disk_system(BANANA_MIN)
        assert len(cs.curves) == 3
        cs = classify(cs)
        labels = sorted(c.cls for c in cs.curves)
        assert labels == ["axis-crossing", "mirror", "positive-side"]
        pos = next(c for c in cs.curves if c.cls == "positive-side")
        mir = next(c for c in cs.curves if c.cls == "mirror")
        refl = mir.points * np.array([-1.0, 1.0])
        assert directed_hausdorff(refl, pos.points) < cs.delta


class TestSimpleMorse:
    def test_pipeline_system_already_simple(self):
        _, cs = cylinder_system(BANANA)
        out = enforce_simple_morse(cs, TOL)
        before = sorted(s for c in cs.curves for s in c.tangency_values())
        after = sorted(s for c in out.curves for s in c.tangency_values())
        assert np.allclose(before, after, atol=1e-9)

    def test_nested_aligned_extremes_get_separated(self):
        tol = Tolerances()
        outer = ClosedCurve(points=ellipse(3.0, 0.0, 2.0, 1.5))
        inner = ClosedCurve(points=ellipse(3.0, 0.0, 1.992, 0.5))
        outer.tangencies = extract_tangencies(outer)
        inner.tangencies = extract_tangencies(inner)
        cs = CurveSystem(curves=[outer, inner], delta=0.02, gap=0.2,
                         symmetric=False)
        out = enforce_simple_morse(cs, tol)
        svals = sorted(s for c in out.curves for s in c.tangency_values())
        assert len(svals) == 4
        assert min(np.diff(svals)) >= tol.tangency_sep

    def test_symmetric_perturbation_stays_symmetric(self):
        tol = Tolerances()
        th = np.linspace(0, 2 * np.pi, 720, endpoint=False)
        circ = ClosedCurve(points=np.column_stack([2 * np.cos(th), 2 * np.sin(th)]))
        posc = ClosedCurve(points=ellipse(3.0, 1.2, 0.995, 0.3))
        mirc = ClosedCurve(points=ellipse(-3.0, 1.2, 0.995, 0.3)[::-1].copy())
        for c in (circ, posc, mirc):
            c.tangencies = extract_tangencies(c)
        cs = CurveSystem(curves=[circ, posc, mirc], delta=0.05, gap=0.5,
                         symmetric=True)
        out = enforce_simple_morse(cs, tol)
        pos_t = sorted(s for c in out.curves for s in c.tangency_values() if s > 0)
        neg_t = sorted(-s for c in out.curves for s in c.tangency_values() if s < 0)
        assert np.allclose(pos_t, neg_t, atol=1e-6)
        assert min(np.diff(pos_t)) >= tol.tangency_sep


class TestClassify:
    def test_cylinder_requires_right_half(self):
        c = ClosedCurve(points=ellipse(0.6, 0.0, 0.4, 0.3))
        c.tangencies = extract_tangencies(c)
        cs = CurveSystem(curves=[c], delta=0.05, gap=0.5, symmetric=False)
        with pytest.raises(RoundforgeError):
            classify(cs, symmetric=False)

    def test_cylinder_positive_ok(self):
        c = ClosedCurve(points=ellipse(2.0, 0.0, 0.5, 0.3))
        c.tangencies = extract_tangencies(c)
        cs = CurveSystem(curves=[c], delta=0.05, gap=0.5, symmetric=False)
        out = classify(cs, symmetric=False)
        assert out.curves[0].cls == "positive-side"


class TestCircleReplace:
    def test_doubled_segment_becomes_unit_circle(self):
        dd, e, cs = disk_system(MINIMAL)
        cs = classify(enforce_simple_morse(cs, TOL))
        out = circle_replace(cs, dd, TOL)
        c = out.curves[0]
        assert c.circle_radius == 1.0
        assert sorted(c.tangency_values()) == [-1.0, 1.0]

    def test_doubled_banana_outer_circle_pair_untouched(self):
        dd, e, cs = disk_system(BANANA_MIN)
        cs = classify(enforce_simple_morse(cs, TOL))
        out = circle_replace(cs, dd, TOL)
        circles = [c for c in out.curves if c.circle_radius is not None]
        assert len(circles) == 1
        rho = circles[0].circle_radius
        kept = [c for c in out.curves if c.circle_radius is None]
        assert len(kept) == 2
        for c in kept:
            assert np.hypot(c.points[:, 0], c.points[:, 1]).max() < rho

    def test_four_degree_one_vertices_rejected(self):
        y = doc([("b", 0), ("c", 1), ("d1", 2), ("d2", 3)],
                [("b", "c"), ("c", "d1"), ("c", "d2")], minimal=["b"])
        dd, e, cs = disk_system(y)
        cs = classify(enforce_simple_morse(cs, TOL))
        with pytest.raises(RoundforgeError) as ei:
            circle_replace(cs, dd, TOL)
        assert ei.value.code == errors.F0_NOT_CONNECTED

    def test_two_ports_nested_feasible(self):
        # two minimal vertices merging: the double is a theta along the axis
        d = doc([("b1", 0), ("b2", 0), ("v", 1), ("z", 2)],
                [("b1", "v"), ("b2", "v"), ("v", "z")], minimal=["b1", "b2"])
        dd, e, cs = disk_system(d)
        cs = classify(enforce_simple_morse(cs, TOL))
        out = circle_replace(cs, dd, TOL)
        radii = sorted(c.circle_radius for c in out.curves)
        assert len(radii) == 2
        assert radii[0] == 1.0 and radii[1] > radii[0]
