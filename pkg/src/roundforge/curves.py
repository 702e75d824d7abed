"""Tubular neighborhood boundaries and their tangency structure.

The boundary of {distance to the embedded graph < delta} is extracted by
marching squares on a windowed distance field, smoothed, and resampled.  Its
tangencies (points where the sweep coordinate s is critical along a curve) are
the backbone of everything downstream: they become the singular radii of the
lifted map, so we enforce that all tangency values are distinct and locally
quadratic, classify curves against the mirror axis, and optionally replace
axis-crossing curves by exact origin-centered circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from roundforge import errors
from roundforge._core import distance_field, pointset_min_dist, self_intersects
from roundforge.config import Tolerances
from roundforge.digraph import SMDigraph, betti1
from roundforge.embed import EmbeddedDigraph
from roundforge.errors import RoundforgeError

MAX_GRID_NODES = 80_000_000


@dataclass
class Tangency:
    s: float
    t: float
    kind: str  # "left" | "right"
    index: int
    curvature: float  # |d2 s / d arclength2| at the extremum


@dataclass
class ClosedCurve:
    points: np.ndarray  # (n, 2), closed implicitly, CCW
    cls: str = "unclassified"
    partner: int | None = None
    tangencies: list[Tangency] = field(default_factory=list)
    circle_radius: float | None = None

    def closed_points(self) -> np.ndarray:
        return np.vstack([self.points, self.points[:1]])

    def diameter(self) -> float:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def tangency_values(self) -> list[float]:
        return [tg.s for tg in self.tangencies]


@dataclass
class CurveSystem:
    curves: list[ClosedCurve]
    delta: float
    gap: float
    symmetric: bool
    embedding: EmbeddedDigraph | None = None


def point_in_polygon(p: np.ndarray, poly: np.ndarray) -> bool:
    """Crossing-number test against the closed polyline ``poly``."""
    x, y = float(p[0]), float(p[1])
    xs, ys = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(xs, -1), np.roll(ys, -1)
    cond = (ys <= y) != (yn <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = xs + (y - ys) * (xn - xs) / (yn - ys)
    return bool(np.sum(cond & (x < xint)) % 2)


def _graph_segments(e: EmbeddedDigraph) -> np.ndarray:
    segs = []
    for _, a, b in e.all_segments():
        segs.append([a[0], a[1], b[0], b[1]])
    return np.asarray(segs, dtype=np.float64)


def _march(field: np.ndarray, level: float, ox: float, oy: float,
           cell: float) -> list[np.ndarray]:
    """Marching squares; returns closed loops of crossing points."""
    v = field.astype(np.float64) - level
    inside = v < 0
    ny, nx = v.shape

    hx = inside[:, :-1] != inside[:, 1:]   # horizontal grid edges
    vx = inside[:-1, :] != inside[1:, :]   # vertical grid edges
    pts: dict[tuple, tuple[float, float]] = {}

    def hpt(ix, iy):
        key = ("H", ix, iy)
        if key not in pts:
            a, b = v[iy, ix], v[iy, ix + 1]
            if not (np.isfinite(a) and np.isfinite(b)):
                frac = 0.5
            else:
                frac = a / (a - b)
            pts[key] = (ox + cell * (ix + frac), oy + cell * iy)
        return key

    def vpt(ix, iy):
        key = ("V", ix, iy)
        if key not in pts:
            a, b = v[iy, ix], v[iy + 1, ix]
            if not (np.isfinite(a) and np.isfinite(b)):
                frac = 0.5
            else:
                frac = a / (a - b)
            pts[key] = (ox + cell * ix, oy + cell * (iy + frac))
        return key

    cells = np.argwhere(hx[:-1, :] | hx[1:, :] | vx[:, :-1] | vx[:, 1:])
    adj: dict[tuple, list[tuple]] = {}

    def link(k1, k2):
        adj.setdefault(k1, []).append(k2)
        adj.setdefault(k2, []).append(k1)

    for iy, ix in cells:
        edges = []
        if hx[iy, ix]:
            edges.append(hpt(ix, iy))
        if vx[iy, ix + 1]:
            edges.append(vpt(ix + 1, iy))
        if hx[iy + 1, ix]:
            edges.append(hpt(ix, iy + 1))
        if vx[iy, ix]:
            edges.append(vpt(ix, iy))
        if len(edges) == 2:
            link(edges[0], edges[1])
        elif len(edges) == 4:
            center = v[iy, ix] + v[iy, ix + 1] + v[iy + 1, ix] + v[iy + 1, ix + 1]
            # corner (ix, iy) inside and center inside join bottom-left pairs
            bl_inside = inside[iy, ix]
            if (center < 0) == bl_inside:
                link(hpt(ix, iy), vpt(ix, iy))
                link(hpt(ix, iy + 1), vpt(ix + 1, iy))
            else:
                link(hpt(ix, iy), vpt(ix + 1, iy))
                link(hpt(ix, iy + 1), vpt(ix, iy))
        elif len(edges) != 0:
            raise RoundforgeError(errors.OPEN_CONTOUR,
                                  f"marching cell with {len(edges)} crossings "
                                  "(grid resolution insufficient)",
                                  stage="boundary_curves")

    loops: list[np.ndarray] = []
    seen: set[tuple] = set()
    for start in adj:
        if start in seen:
            continue
        walk = [start]
        seen.add(start)
        prev = None
        cur = start
        while True:
            nbrs = [k for k in adj[cur] if k != prev]
            if not nbrs:
                raise RoundforgeError(errors.OPEN_CONTOUR,
                                      "open contour chain "
                                      "(grid resolution insufficient)",
                                      stage="boundary_curves")
            nxt = nbrs[0]
            if nxt == start:
                break
            if nxt in seen and nxt != start:
                # would re-enter a visited point other than the start
                raise RoundforgeError(errors.OPEN_CONTOUR,
                                      "contour chain self-collision",
                                      stage="boundary_curves")
            walk.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        loops.append(np.array([pts[k] for k in walk], dtype=float))
    return loops


def _smooth_closed(p: np.ndarray, passes: int) -> np.ndarray:
    q = p.copy()
    for _ in range(passes):
        q = (np.roll(q, 1, axis=0) + 2.0 * q + np.roll(q, -1, axis=0)) / 4.0
    return q


def _resample_closed(p: np.ndarray, spacing: float, min_pts: int = 96) -> np.ndarray:
    closed = np.vstack([p, p[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    L = float(seg.sum())
    n = max(min_pts, int(round(L / spacing)))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, L, n, endpoint=False)
    out = np.empty((n, 2))
    out[:, 0] = np.interp(targets, cum, closed[:, 0])
    out[:, 1] = np.interp(targets, cum, closed[:, 1])
    return out


def _orient_ccw(p: np.ndarray) -> np.ndarray:
    x, y = p[:, 0], p[:, 1]
    area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    return p if area2 > 0 else p[::-1].copy()


def extract_tangencies(curve: ClosedCurve) -> list[Tangency]:
    """Locate extrema of s along the curve, parabola-refined.

    Exact replacement circles get their two tangencies analytically.
    """
    if curve.circle_radius is not None:
        r = curve.circle_radius
        return [Tangency(-r, 0.0, "left", 0, 1.0 / r),
                Tangency(r, 0.0, "right", 0, 1.0 / r)]
    p = curve.points
    n = len(p)
    s = p[:, 0]
    ds = np.roll(s, -1) - s
    # robust sign: carry the previous sign through flat stretches
    sign = np.zeros(n, dtype=int)
    cur = 0
    for i in range(n):
        if ds[i] > 1e-13:
            cur = 1
        elif ds[i] < -1e-13:
            cur = -1
        sign[i] = cur
    if cur == 0:
        return []
    for i in range(n):
        if sign[i] != 0:
            break
        sign[i] = cur  # leading flats continue the wrapped-around tail sign

    out: list[Tangency] = []
    seg = np.hypot(*np.diff(np.vstack([p, p[:1]]), axis=0).T)
    for i in range(n):
        a, b = sign[i - 1], sign[i]
        if a == b:
            continue
        kind = "right" if (a > 0 and b < 0) else "left"
        # parabola through (arclength, s) at i-1, i, i+1
        l0 = -seg[i - 1]
        l1 = 0.0
        l2 = seg[i % n]
        s0, s1, s2 = s[i - 1], s[i], s[(i + 1) % n]
        denom = (l0 - l1) * (l0 - l2) * (l1 - l2)
        if denom == 0:
            sv, tv, curv = s1, p[i, 1], 0.0
        else:
            A = (l2 * (s1 - s0) + l1 * (s0 - s2) + l0 * (s2 - s1)) / denom
            B = (l2 * l2 * (s0 - s1) + l1 * l1 * (s2 - s0) + l0 * l0 * (s1 - s2)) / denom
            curv = abs(2.0 * A)
            lv = -B / (2.0 * A) if A != 0 else 0.0
            lv = max(l0, min(l2, lv))
            sv = s1 + B * lv + A * lv * lv
            if lv <= 0:
                w = -lv / seg[i - 1] if seg[i - 1] > 0 else 0.0
                tv = p[i, 1] * (1 - w) + p[i - 1, 1] * w
            else:
                w = lv / seg[i % n] if seg[i % n] > 0 else 0.0
                tv = p[i, 1] * (1 - w) + p[(i + 1) % n, 1] * w
        out.append(Tangency(float(sv), float(tv), kind, i, float(curv)))
    out.sort(key=lambda tg: tg.s)
    return out


def boundary_curves(e: EmbeddedDigraph, delta: float,
                    tol: Tolerances = Tolerances(),
                    gap: float | None = None) -> CurveSystem:
    """Level-delta contour of the distance field around the embedded graph."""
    from roundforge.embed import feature_gap

    if gap is None:
        gap = feature_gap(e)
    if not delta < gap / 2.0:
        raise RoundforgeError(errors.DELTA_TOO_LARGE,
                              f"delta {delta} must be below half the feature gap "
                              f"{gap}", stage="boundary_curves")
    segs = _graph_segments(e)
    x0, y0, x1, y1 = e.bounding_box(pad=2.0 * delta)
    cell = delta / tol.grid_per_delta
    if (x1 - x0) * (y1 - y0) / (cell * cell) > MAX_GRID_NODES:
        cell = math.sqrt((x1 - x0) * (y1 - y0) / MAX_GRID_NODES)
    if e.symmetric:
        # nodes exactly mirror-symmetric about s=0, so the marched system
        # inherits the reflection symmetry up to rounding
        k = int(math.ceil(max(-x0, x1) / cell))
        x0, x1 = -k * cell, k * cell
        nx = 2 * k + 1
    else:
        nx = int(math.ceil((x1 - x0) / cell)) + 1
    ny = int(math.ceil((y1 - y0) / cell)) + 1
    fld = distance_field(x0, y0, cell, nx, ny, segs, delta + 8 * cell)
    loops = _march(fld, delta, x0, y0, cell)

    expected = betti1(e.graph) + 1
    if len(loops) != expected:
        raise RoundforgeError(
            errors.COMPONENT_COUNT_MISMATCH,
            f"contour has {len(loops)} components, expected b1+1 = {expected} "
            "(delta too large or too small)", stage="boundary_curves",
            details={"found": len(loops), "expected": expected})

    spacing = delta * tol.resample_spacing_factor
    curves = []
    for lp in loops:
        q = _smooth_closed(lp, tol.smooth_passes)
        q = _resample_closed(q, spacing)
        q = _orient_ccw(q)
        c = ClosedCurve(points=q)
        c.tangencies = extract_tangencies(c)
        curves.append(c)
    curves.sort(key=lambda c: (-c.diameter(), c.points[:, 0].min()))
    return CurveSystem(curves=curves, delta=delta, gap=gap,
                       symmetric=e.symmetric, embedding=e)


def _axis_crossing_count(c: ClosedCurve) -> int:
    s = c.points[:, 0]
    return int(np.sum((s > 0) != (np.roll(s, -1) > 0)))


def _mirror_pairs(cs: CurveSystem) -> tuple[list[int], list[tuple[int, int]], list[int]]:
    """Split curve indices into (axis-crossing, (positive, mirror) pairs, leftovers)."""
    from roundforge._core import directed_hausdorff

    axis, pos, neg = [], [], []
    for i, c in enumerate(cs.curves):
        k = _axis_crossing_count(c)
        if k > 0:
            axis.append(i)
        elif c.points[:, 0].min() > 0:
            pos.append(i)
        else:
            neg.append(i)
    pairs: list[tuple[int, int]] = []
    match_tol = cs.delta
    unmatched = []
    for j in neg:
        refl = cs.curves[j].points * np.array([-1.0, 1.0])
        best, bestd = None, math.inf
        for i in pos:
            d = directed_hausdorff(np.ascontiguousarray(refl), cs.curves[i].points)
            if d < bestd:
                best, bestd = i, d
        if best is not None and bestd < match_tol:
            pairs.append((best, j))
        else:
            unmatched.append(j)
    paired_pos = {i for i, _ in pairs}
    leftovers = unmatched + [i for i in pos if i not in paired_pos]
    return axis, pairs, leftovers


def enforce_simple_morse(cs: CurveSystem, tol: Tolerances = Tolerances()) -> CurveSystem:
    """Perturb curves locally until all tangency s-values are distinct.

    Bumps are windowed displacements of the sweep coordinate along the curve,
    capped at gap/4 in total; symmetric systems get mirrored bumps so the
    reflection symmetry survives exactly.
    """
    sep = tol.tangency_sep
    budget = cs.gap / 4.0
    curves = [replace(c, points=c.points.copy(), tangencies=list(c.tangencies))
              for c in cs.curves]
    moved = np.zeros(len(curves))

    pair_of: dict[int, int] = {}
    if cs.symmetric:
        _, pairs, _ = _mirror_pairs(cs)
        for i, j in pairs:
            pair_of[i] = j
            pair_of[j] = i

    def all_tangencies():
        out = []
        for ci, c in enumerate(curves):
            for ti, tg in enumerate(c.tangencies):
                if cs.symmetric and tg.s < 0:
                    continue  # mirror images move jointly with their partners
                out.append((tg.s, ci, ti))
        out.sort()
        return out

    def bump(ci: int, ti: int, amount: float):
        """Shift the s-values around tangency ti of curve ci by ``amount``."""
        c = curves[ci]
        tg = c.tangencies[ti]
        n = len(c.points)
        width = max(10, n // 16)
        idx = np.arange(-width, width + 1)
        window = 0.5 * (1.0 + np.cos(np.pi * idx / width))
        targets = [(ci, tg.index, 1.0)]
        if cs.symmetric:
            if _axis_crossing_count(c) > 0:
                # mirrored bump on the same curve at the reflected tangency
                mi = int(np.argmin(np.hypot(c.points[:, 0] + tg.s,
                                            c.points[:, 1] - tg.t)))
                targets.append((ci, mi, -1.0))
            elif ci in pair_of:
                pj = pair_of[ci]
                pc = curves[pj]
                mi = int(np.argmin(np.hypot(pc.points[:, 0] + tg.s,
                                            pc.points[:, 1] - tg.t)))
                targets.append((pj, mi, -1.0))
        for cj, center, orient in targets:
            pts = curves[cj].points
            ii = (center + idx) % len(pts)
            pts[ii, 0] += orient * amount * window
        curves[ci].tangencies = extract_tangencies(curves[ci])
        if cs.symmetric and ci in pair_of:
            pj = pair_of[ci]
            curves[pj].tangencies = extract_tangencies(curves[pj])

    for _ in range(24):
        tgs = all_tangencies()
        collision = None
        for k in range(len(tgs) - 1):
            if tgs[k + 1][0] - tgs[k][0] < sep:
                collision = (tgs[k], tgs[k + 1])
                break
        if collision is None:
            break
        (s_lo, ci_lo, ti_lo), (s_hi, ci_hi, ti_hi) = collision
        need = sep - (s_hi - s_lo) + sep / 4.0
        # move the later tangency upward; fall back to moving the earlier down
        ci, ti, amount = ci_hi, ti_hi, need
        if moved[ci_hi] + need > budget:
            ci, ti, amount = ci_lo, ti_lo, -need
            if moved[ci_lo] + need > budget:
                raise RoundforgeError(
                    errors.PERTURBATION_BUDGET,
                    f"cannot separate tangencies near s={s_lo:.4f} within "
                    f"budget gap/4 = {budget:.4f}", stage="enforce_simple_morse")
        bump(ci, ti, amount)
        moved[ci] += abs(amount)
    else:
        raise RoundforgeError(errors.PERTURBATION_BUDGET,
                              "tangency separation did not converge",
                              stage="enforce_simple_morse")

    for c in curves:
        if self_intersects(np.ascontiguousarray(c.points)):
            raise RoundforgeError(errors.PERTURBATION_BUDGET,
                                  "perturbation made a curve self-intersect",
                                  stage="enforce_simple_morse")
    out = CurveSystem(curves=curves, delta=cs.delta, gap=cs.gap,
                      symmetric=cs.symmetric, embedding=cs.embedding)
    _check_disjoint(out)
    return out


def _check_disjoint(cs: CurveSystem, floor: float | None = None):
    if floor is None:
        floor = cs.delta / 4.0
    for i in range(len(cs.curves)):
        for j in range(i + 1, len(cs.curves)):
            d = pointset_min_dist(cs.curves[i].points, cs.curves[j].points)
            if d < floor:
                raise RoundforgeError(
                    errors.DELTA_TOO_LARGE,
                    f"curves {i} and {j} come within {d:.5f} (< {floor:.5f})",
                    stage="curves")


def classify(cs: CurveSystem, symmetric: bool | None = None,
             tol: Tolerances = Tolerances()) -> CurveSystem:
    """Label every curve positive-side, mirror, or axis-crossing."""
    if symmetric is None:
        symmetric = cs.symmetric
    curves = [replace(c, tangencies=list(c.tangencies)) for c in cs.curves]
    if symmetric:
        axis, pairs, leftovers = _mirror_pairs(cs)
        if leftovers:
            raise RoundforgeError(
                errors.ASYMMETRIC_SYSTEM,
                f"curves {leftovers} have no mirror partner", stage="classify")
        for i in axis:
            k = _axis_crossing_count(curves[i])
            if k != 2:
                raise RoundforgeError(
                    errors.AXIS_CROSSING_COUNT,
                    f"curve {i} crosses the axis {k} times, expected 2",
                    stage="classify")
            curves[i].cls = "axis-crossing"
        for i, j in pairs:
            curves[i].cls = "positive-side"
            curves[j].cls = "mirror"
            curves[i].partner = j
            curves[j].partner = i
    else:
        for i, c in enumerate(curves):
            if c.points[:, 0].min() < 0.5:
                raise RoundforgeError(
                    errors.MODE_MISMATCH,
                    f"curve {i} dips below s=1/2 in a non-symmetric system",
                    stage="classify")
            c.cls = "positive-side"
    return CurveSystem(curves=curves, delta=cs.delta, gap=cs.gap,
                       symmetric=symmetric, embedding=cs.embedding)


def _origin_distance_range(c: ClosedCurve) -> tuple[float, float]:
    r = np.hypot(c.points[:, 0], c.points[:, 1])
    return float(r.min()), float(r.max())


def circle_replace(cs: CurveSystem, dbl: SMDigraph,
                   tol: Tolerances = Tolerances()) -> CurveSystem:
    """Replace every axis-crossing curve by an origin-centered circle.

    Radii are chosen so the tangency event order and the inside/outside
    relations with all kept curves are preserved; feasibility can fail (more
    than one stacked axis lens cannot become concentric circles).
    """
    d1 = sum(1 for v in dbl.vertex_ids() if dbl.degree(v) == 1)
    if d1 != 2:
        raise RoundforgeError(
            errors.F0_NOT_CONNECTED,
            f"double has {d1} degree-1 vertices, need exactly 2",
            stage="circle_replace")
    if not cs.symmetric:
        raise RoundforgeError(errors.ASYMMETRIC_SYSTEM,
                              "circle replacement needs a symmetric system",
                              stage="circle_replace")
    axis_idx = [i for i, c in enumerate(cs.curves) if c.cls == "axis-crossing"]
    kept_idx = [i for i, c in enumerate(cs.curves) if c.cls != "axis-crossing"]
    if any(c.cls == "unclassified" for c in cs.curves):
        raise RoundforgeError(errors.ASYMMETRIC_SYSTEM,
                              "classify the system before circle replacement",
                              stage="circle_replace")

    for i in axis_idx:
        if len(cs.curves[i].tangencies) != 2:
            raise RoundforgeError(
                errors.NOT_CAP_SHAPED,
                f"axis-crossing curve {i} has {len(cs.curves[i].tangencies)} "
                "tangencies, a circle needs exactly 2", stage="circle_replace")

    # axis chords must be totally nested for concentric replacements
    def chord(c: ClosedCurve) -> tuple[float, float]:
        s = c.points[:, 0]
        t = c.points[:, 1]
        cross = np.where((s > 0) != (np.roll(s, -1) > 0))[0]
        tv = []
        for i in cross:
            j = (i + 1) % len(s)
            w = s[i] / (s[i] - s[j]) if s[i] != s[j] else 0.5
            tv.append(t[i] * (1 - w) + t[j] * w)
        return min(tv), max(tv)

    chords = {i: chord(cs.curves[i]) for i in axis_idx}
    order = sorted(axis_idx, key=lambda i: chords[i][1] - chords[i][0])
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            lo_a, hi_a = chords[order[a]]
            lo_b, hi_b = chords[order[b]]
            if not (lo_b < lo_a and hi_a < hi_b):
                raise RoundforgeError(
                    errors.NO_FEASIBLE_RADIUS,
                    "axis chords are stacked, not nested; concentric circles "
                    "cannot replace them", stage="circle_replace")

    kept_events = sorted(
        tg.s for i in kept_idx for tg in cs.curves[i].tangencies if tg.s > 0)
    sep = max(tol.tangency_sep, cs.delta / 2.0)

    new_curves = [replace(c, points=c.points.copy(), tangencies=list(c.tangencies))
                  for c in cs.curves]
    prev_rho: float | None = None
    for i in order:
        sigma = max(tg.s for tg in cs.curves[i].tangencies)
        lo = 0.0 if prev_rho is None else prev_rho + sep
        hi = math.inf
        for ev in kept_events:
            if ev < sigma:
                lo = max(lo, ev + sep)
            else:
                hi = min(hi, ev - sep)
        for j in kept_idx:
            rmin, rmax = _origin_distance_range(cs.curves[j])
            inside = point_in_polygon(cs.curves[j].points[0],
                                      cs.curves[i].closed_points())
            if inside:
                lo = max(lo, rmax + sep)
            else:
                hi = min(hi, rmin - sep)
        if not lo < hi:
            raise RoundforgeError(
                errors.NO_FEASIBLE_RADIUS,
                f"no radius interval for axis curve {i}: ({lo:.4f}, {hi:.4f})",
                stage="circle_replace")
        if math.isinf(hi):
            rho = 1.0 if lo <= 0 else lo + 1.0
        else:
            rho = (max(lo, 0.0) + hi) / 2.0
        prev_rho = rho

        n = max(256, len(cs.curves[i].points))
        th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        pts = np.column_stack([rho * np.cos(th), rho * np.sin(th)])
        c = ClosedCurve(points=pts, cls="axis-crossing", circle_radius=rho)
        c.tangencies = extract_tangencies(c)
        new_curves[i] = c

    out = CurveSystem(curves=new_curves, delta=cs.delta, gap=cs.gap,
                      symmetric=True, embedding=cs.embedding)
    _check_disjoint(out, floor=min(cs.delta, sep) / 4.0)
    return enforce_simple_morse(out, tol)
