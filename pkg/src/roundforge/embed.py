"""Planar embeddings whose first coordinate is the height function.

The embedder sweeps vertices by increasing height, maintaining the vertical
order of edge strands crossing the sweep line and backtracking over insertion
positions and outgoing strand orders.  Failure after exhausting the search
certifies that no height-compatible planar embedding exists.  Coordinates are
laid out on a unit-spaced channel ladder and lightly relaxed, which bounds the
feature gap from below for the tubular stage.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from roundforge import errors
from roundforge._core import pointset_min_dist
from roundforge.digraph import DoubledDigraph, Edge, HeightDigraph, SMDigraph
from roundforge.errors import RoundforgeError


@dataclass
class EmbeddedDigraph:
    graph: SMDigraph
    positions: dict[str, tuple[float, float]]
    edge_paths: dict[str, np.ndarray]  # strictly s-monotone polylines
    symmetric: bool = False
    axis_ports: dict[str, float] = field(default_factory=dict)  # edge id -> t at s=0

    def all_segments(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        out = []
        for eid, path in sorted(self.edge_paths.items()):
            for i in range(len(path) - 1):
                out.append((eid, path[i], path[i + 1]))
        return out

    def bounding_box(self, pad: float = 0.0) -> tuple[float, float, float, float]:
        pts = np.vstack(list(self.edge_paths.values()))
        return (float(pts[:, 0].min()) - pad, float(pts[:, 1].min()) - pad,
                float(pts[:, 0].max()) + pad, float(pts[:, 1].max()) + pad)


Event = tuple[str, tuple[str, ...], tuple[str, ...]]  # vertex, in edge ids, out edge ids


def _events(g: SMDigraph, skip: frozenset[str] = frozenset()) -> list[Event]:
    heights = g.heights()
    ids = [v for v in g.vertex_ids() if v not in skip]
    ids.sort(key=lambda v: heights[v])
    evs = []
    for v in ids:
        ins = tuple(sorted(e.id for e in g.base.in_edges(v)))
        outs = tuple(sorted(e.id for e in g.base.out_edges(v)))
        evs.append((v, ins, outs))
    return evs


def _search(events: list[Event], active: tuple[str, ...], idx: int,
            memo: set) -> list[tuple[str, ...]] | None:
    """Active strand orders after each remaining event, or None if impossible."""
    if idx == len(events):
        return [] if not active else None
    key = (idx, active)
    if key in memo:
        return None
    v, ins, outs = events[idx]
    results = None
    if ins:
        pos = [i for i, a in enumerate(active) if a in ins]
        if len(pos) == len(ins) and pos[-1] - pos[0] == len(ins) - 1:
            before, after = active[: pos[0]], active[pos[0] + len(ins):]
            for perm in _perms(outs):
                nxt = before + perm + after
                sub = _search(events, nxt, idx + 1, memo)
                if sub is not None:
                    results = [nxt] + sub
                    break
    else:
        for i in range(len(active) + 1):
            for perm in _perms(outs):
                nxt = active[:i] + perm + active[i:]
                sub = _search(events, nxt, idx + 1, memo)
                if sub is not None:
                    results = [nxt] + sub
                    break
            if results is not None:
                break
    if results is None:
        memo.add(key)
    return results


def _perms(outs: tuple[str, ...]):
    if len(outs) <= 1:
        yield outs
    else:
        yield from itertools.permutations(outs)


def _channels(order: tuple[str, ...]) -> dict[str, float]:
    n = len(order)
    return {eid: i - (n - 1) / 2.0 for i, eid in enumerate(order)}


def _build_paths(g: SMDigraph, events: list[Event], slabs: list[tuple[str, ...]],
                 event_heights: list[float],
                 port_pos: dict[str, tuple[float, float]] | None = None,
                 relax_passes: int = 3) -> EmbeddedDigraph:
    """Turn sweep output into vertex positions and strand polylines.

    ``slabs[j]`` is the active order after event j; strand breakpoints sit at
    slab midpoints on unit-spaced, centered channels.
    """
    heights = g.heights()
    # channel of each strand per slab
    slab_channels = [_channels(s) for s in slabs]
    # breakpoints per edge: (mid-height, channel)
    breaks: dict[str, list[list[float]]] = {e.id: [] for e in g.base.edges}
    for j in range(len(slabs) - 1):
        mid = (event_heights[j] + event_heights[j + 1]) / 2.0
        for eid in slabs[j]:
            breaks[eid].append([mid, slab_channels[j][eid]])

    # vertex t = mean of adjacent strand channels next to its own event
    positions: dict[str, tuple[float, float]] = {}
    for j, (v, ins, outs) in enumerate(events):
        if v not in heights:
            continue  # synthetic port event
        chans = []
        if outs and j < len(slab_channels):
            chans += [slab_channels[j][e] for e in outs]
        if ins and j > 0:
            chans += [slab_channels[j - 1][e] for e in ins]
        t = float(np.mean(chans)) if chans else 0.0
        positions[v] = (heights[v], t)
    if port_pos:
        positions.update(port_pos)

    # light relaxation: straighten interior breakpoints, bounded so channel
    # order (and so planarity) is preserved
    for _ in range(relax_passes):
        for eid, bps in breaks.items():
            if len(bps) < 2:
                continue
            tail = positions[_edge(g, eid).tail]
            head = positions[_edge(g, eid).head]
            ts = [tail[1]] + [b[1] for b in bps] + [head[1]]
            for i in range(len(bps)):
                target = (ts[i] + 2 * ts[i + 1] + ts[i + 2]) / 4.0
                move = max(-0.2, min(0.2, target - bps[i][1]))
                bps[i][1] += move * 0.5
        # recenter each column is skipped: bounded moves keep >=0.6 clearance

    edge_paths: dict[str, np.ndarray] = {}
    for e in g.base.edges:
        pts = [list(positions[e.tail])] + breaks[e.id] + [list(positions[e.head])]
        edge_paths[e.id] = np.array(pts, dtype=float)
    return EmbeddedDigraph(graph=g, positions=positions, edge_paths=edge_paths)


def _edge(g: SMDigraph, eid: str) -> Edge:
    for e in g.base.edges:
        if e.id == eid:
            return e
    raise KeyError(eid)


def embed_height_planar(g: SMDigraph) -> EmbeddedDigraph:
    """Height-planar embedding of a closed-type digraph (degrees 1 or 3)."""
    if g.minimal_set:
        raise RoundforgeError(errors.MODE_MISMATCH,
                              "plain embedding requires an empty minimal set",
                              stage="embed")
    if not g.is_realizable():
        raise RoundforgeError(errors.NOT_REALIZABLE,
                              "embedding requires all degrees 1 or 3", stage="embed")
    events = _events(g)
    slabs = _search(events, (), 0, set())
    if slabs is None:
        raise RoundforgeError(errors.NOT_HEIGHT_PLANAR,
                              "search exhausted: no height-compatible planar embedding",
                              stage="embed")
    heights = g.heights()
    ev_h = [heights[v] for v, _, _ in events]
    return _build_paths(g, events, slabs, ev_h)


def embed_symmetric(dbl: SMDigraph) -> EmbeddedDigraph:
    """Mirror-symmetric embedding of a double; glued points land on {s=0}.

    The positive half is embedded by the sweep with the former minimal
    vertices as ports on the axis (all orders tried), then reflected.
    """
    if not isinstance(dbl, DoubledDigraph) or dbl.half is None:
        raise RoundforgeError(errors.NOT_A_DOUBLE,
                              "symmetric embedding needs the double of a digraph",
                              stage="embed")
    half = dbl.half
    if not dbl.is_realizable():
        raise RoundforgeError(errors.NOT_REALIZABLE,
                              "embedding requires all degrees 1 or 3", stage="embed")
    ports = sorted(dbl.axis_edges)  # merged edge ids, one per former minimal vertex
    events = _events(half, skip=frozenset(half.minimal_set))
    slabs = None
    order_used: tuple[str, ...] | None = None
    memo: set = set()
    for port_order in itertools.permutations(ports):
        got = _search(events, tuple(port_order), 0, memo)
        if got is not None:
            slabs = [tuple(port_order)] + got
            order_used = tuple(port_order)
            break
    if slabs is None or order_used is None:
        raise RoundforgeError(errors.NOT_HEIGHT_PLANAR,
                              "search exhausted: no symmetric height-planar embedding",
                              stage="embed")

    heights = half.heights()
    ev_h = [0.0] + [heights[v] for v, _, _ in events]
    port_chan = _channels(order_used)
    port_pos = {dbl.axis_edges[eid]: (0.0, port_chan[eid]) for eid in order_used}
    # prepend the port event so slab indexing lines up
    port_event: Event = ("__ports__", (), order_used)
    half_embed = _build_paths(half, [port_event] + events, slabs, ev_h,
                              port_pos=port_pos)

    # assemble the double: positive half, mirrored half, merged through-paths
    positions: dict[str, tuple[float, float]] = {}
    for v in half.vertex_ids():
        if v in half.minimal_set:
            continue
        s, t = half_embed.positions[v]
        positions[v] = (s, t)
        positions[dbl.mirror[v]] = (-s, t)

    edge_paths: dict[str, np.ndarray] = {}
    axis_ports: dict[str, float] = {}
    for e in dbl.base.edges:
        if e.id in dbl.axis_edges:
            p = half_embed.edge_paths[e.id]
            mirrored = p[::-1].copy()
            mirrored[:, 0] *= -1.0
            edge_paths[e.id] = np.vstack([mirrored[:-1], p])
            axis_ports[e.id] = float(p[0, 1])
        elif e.id in half_embed.edge_paths:
            edge_paths[e.id] = half_embed.edge_paths[e.id]
        else:
            orig = e.id[: -len(dbl.suffix)]
            p = half_embed.edge_paths[orig]
            mirrored = p[::-1].copy()
            mirrored[:, 0] *= -1.0
            edge_paths[e.id] = mirrored
    dbl_pos = {v: positions[v] for v in dbl.vertex_ids()}
    return EmbeddedDigraph(graph=dbl, positions=dbl_pos, edge_paths=edge_paths,
                           symmetric=True, axis_ports=axis_ports)


def _seg_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return float(np.hypot(*(p - a)))
    t = max(0.0, min(1.0, float((p - a) @ ab) / L2))
    return float(np.hypot(*(p - a - t * ab)))


def _segments_cross(a, b, c, d) -> bool:
    def cr(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    d1, d2 = cr(a, b, c), cr(a, b, d)
    d3, d4 = cr(c, d, a), cr(c, d, b)
    return d1 * d2 < 0 and d3 * d4 < 0


def validate_embedding(e: EmbeddedDigraph) -> dict:
    """Check all embedding invariants; report violations with locations."""
    issues: list[dict] = []
    heights = e.graph.heights()
    for v, (s, t) in e.positions.items():
        if v in heights and s != heights[v]:
            issues.append({"kind": "height", "vertex": v,
                           "message": f"vertex {v}: s={s} != height {heights[v]}"})
    for eid, path in sorted(e.edge_paths.items()):
        ds = np.diff(path[:, 0])
        if not np.all(ds > 0):
            issues.append({"kind": "monotonicity", "edge": eid,
                           "message": f"edge {eid} polyline is not strictly s-monotone"})
    segs = e.all_segments()
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            e1, a, b = segs[i]
            e2, c, d = segs[j]
            shared = any(np.array_equal(p, q) for p in (a, b) for q in (c, d))
            if shared:
                continue
            if _segments_cross(a, b, c, d):
                issues.append({"kind": "planarity", "edges": [e1, e2],
                               "message": f"edges {e1} and {e2} cross near "
                                          f"({(a[0]+b[0])/2:.3f}, {(a[1]+b[1])/2:.3f})"})
    if e.symmetric:
        pts = {(round(float(s), 9), round(float(t), 9))
               for path in e.edge_paths.values() for s, t in path}
        refl = {(-s, t) for s, t in pts}
        if pts != refl:
            issues.append({"kind": "symmetry",
                           "message": "point set is not invariant under (s,t)->(-s,t)"})
    return {"ok": not issues, "issues": issues}


def digraph_from_embedding(e: EmbeddedDigraph) -> SMDigraph:
    """Reconstruct the combinatorial digraph (round-trip check support)."""
    verts = tuple(sorted((v, float(s)) for v, (s, _) in e.positions.items()
                         if v in dict(e.graph.base.vertices)))
    edges = []
    pos_to_v = {(round(s, 9), round(t, 9)): v for v, (s, t) in e.positions.items()}
    for eid, path in sorted(e.edge_paths.items()):
        tail = pos_to_v[(round(float(path[0, 0]), 9), round(float(path[0, 1]), 9))]
        head = pos_to_v[(round(float(path[-1, 0]), 9), round(float(path[-1, 1]), 9))]
        edges.append(Edge(eid, tail, head))
    return SMDigraph(HeightDigraph(verts, tuple(edges)), frozenset())


def feature_gap(e: EmbeddedDigraph) -> float:
    """Min clearance between non-adjacent embedded features.

    Edge pairs sharing a vertex are compared away from a guard disk around
    the shared endpoint (converging strands are legitimately close there).
    """
    guard = 0.45
    dense: dict[str, np.ndarray] = {}
    for eid, path in e.edge_paths.items():
        pts = [path[0]]
        for i in range(len(path) - 1):
            a, b = path[i], path[i + 1]
            n = max(2, int(math.ceil(np.hypot(*(b - a)) / 0.05)))
            for k in range(1, n + 1):
                pts.append(a + (b - a) * k / n)
        dense[eid] = np.array(pts)

    ends: dict[str, list[np.ndarray]] = {}
    for eid, path in e.edge_paths.items():
        ends[eid] = [path[0], path[-1]]

    gap = math.inf
    eids = sorted(dense)
    for i in range(len(eids)):
        for j in range(i + 1, len(eids)):
            a, b = dense[eids[i]], dense[eids[j]]
            shared = [p for p in ends[eids[i]]
                      for q in ends[eids[j]] if np.array_equal(p, q)]
            am, bm = a, b
            for p in shared:
                am = am[np.hypot(am[:, 0] - p[0], am[:, 1] - p[1]) > guard]
                bm = bm[np.hypot(bm[:, 0] - p[0], bm[:, 1] - p[1]) > guard]
            if len(am) == 0 or len(bm) == 0:
                continue
            gap = min(gap, pointset_min_dist(np.ascontiguousarray(am),
                                             np.ascontiguousarray(bm)))
    if not math.isfinite(gap):
        gap = 1.0  # single-edge graphs have no strand pairs
    return float(gap)
