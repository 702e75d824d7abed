"""Height-labeled digraphs: validation, doubling, invariants, isomorphism,
and the expected topology of the manifold a digraph synthesizes to.

A digraph here is a finite connected multigraph whose vertices carry real
heights and whose edges point from lower to higher height.  The admissible
inputs additionally satisfy: every vertex degree is 1, 2 or 3; every source
and every sink has degree 1; heights are pairwise distinct except on the
distinguished minimal set, which sits alone at the unique minimum level.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from roundforge import errors
from roundforge.errors import RoundforgeError, ValidationError


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class HeightDigraph:
    vertices: tuple[tuple[str, float], ...]
    edges: tuple[Edge, ...]

    def heights(self) -> dict[str, float]:
        return dict(self.vertices)

    def vertex_ids(self) -> list[str]:
        return [v for v, _ in self.vertices]

    def out_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.tail == v]

    def in_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.head == v]

    def degree(self, v: str) -> int:
        return sum(1 for e in self.edges if e.tail == v or e.head == v)

    def is_source(self, v: str) -> bool:
        return self.degree(v) > 0 and not self.in_edges(v)

    def is_sink(self, v: str) -> bool:
        return self.degree(v) > 0 and not self.out_edges(v)


@dataclass(frozen=True)
class SMDigraph:
    base: HeightDigraph
    minimal_set: frozenset[str] = frozenset()

    def heights(self) -> dict[str, float]:
        return self.base.heights()

    def vertex_ids(self) -> list[str]:
        return self.base.vertex_ids()

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.base.edges

    def degree(self, v: str) -> int:
        return self.base.degree(v)

    def is_realizable(self) -> bool:
        """Degrees all 1 or 3; the class the synthesis theorems cover."""
        return all(self.base.degree(v) in (1, 3) for v in self.vertex_ids())

    def degree_counts(self) -> Counter:
        return Counter(self.base.degree(v) for v in self.vertex_ids())


@dataclass(frozen=True)
class DoubledDigraph(SMDigraph):
    """Double of a bounded-type digraph; remembers the mirror structure.

    ``mirror`` maps each vertex to its reflection partner, ``axis_edges`` maps
    each through-edge to the former minimal vertex it absorbed, and ``half``
    is the height-shifted original (minimum moved to 0).
    """

    mirror: dict[str, str] = field(default_factory=dict)
    axis_edges: dict[str, str] = field(default_factory=dict)
    half: SMDigraph | None = None
    suffix: str = "*"


@dataclass(frozen=True)
class TopologyDescriptor:
    model: str  # sphere | connected-sum | product | ambiguous-4d
    l: int
    m: int

    def describe(self) -> str:
        if self.model == "sphere":
            return f"S^{self.m}"
        if self.model == "connected-sum":
            if self.l == 1:
                return f"S^1 x S^{self.m - 1}"
            return f"#_{self.l} (S^1 x S^{self.m - 1})"
        if self.model == "product":
            surface = "S^2" if self.l == 0 else f"Sigma_{self.l}"
            return f"S^{self.m - 2} x {surface}"
        return "S^2 x S^2 or a twisted S^2-bundle over S^2"

    def to_dict(self) -> dict:
        return {"model": self.model, "l": self.l, "m": self.m,
                "description": self.describe()}


def _connected(vertex_ids: list[str], edges: list[Edge]) -> bool:
    if not vertex_ids:
        return False
    adj: dict[str, set[str]] = {v: set() for v in vertex_ids}
    for e in edges:
        if e.tail in adj and e.head in adj:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    seen = {vertex_ids[0]}
    stack = [vertex_ids[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertex_ids)


def check(doc: dict) -> list[dict]:
    """Collect every invariant violation in a digraph document.

    Returns an empty list iff the document describes a valid digraph.
    Each violation is ``{"code", "message"}`` with a stable code.
    """
    out: list[dict] = []

    def bad(code: str, message: str) -> None:
        out.append({"code": code, "message": message})

    verts = doc.get("vertices", [])
    edges_doc = doc.get("edges", [])
    minimal = list(doc.get("minimal_set", []))

    if not verts:
        bad(errors.EMPTY_GRAPH, "no vertices")
        return out

    ids = [v["id"] for v in verts]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        bad(errors.BAD_DOCUMENT, f"duplicate vertex ids: {dup}")
        return out
    heights = {v["id"]: float(v["height"]) for v in verts}

    edges: list[Edge] = []
    seen_eids: set[str] = set()
    for i, e in enumerate(edges_doc):
        eid = str(e.get("id", f"e{i}"))
        if eid in seen_eids:
            bad(errors.BAD_DOCUMENT, f"duplicate edge id: {eid}")
            return out
        seen_eids.add(eid)
        edges.append(Edge(eid, e["tail"], e["head"]))

    for e in edges:
        for v in (e.tail, e.head):
            if v not in heights:
                bad(errors.UNKNOWN_VERTEX, f"edge {e.id} references unknown vertex {v!r}")
    if out:
        return out

    for e in edges:
        if e.tail == e.head:
            bad(errors.SELF_LOOP, f"edge {e.id} is a self-loop at {e.tail}")
        elif heights[e.tail] >= heights[e.head]:
            bad(errors.EDGE_NOT_INCREASING,
                f"edge {e.id}: height({e.tail})={heights[e.tail]} not below "
                f"height({e.head})={heights[e.head]}")

    g = HeightDigraph(tuple((v, heights[v]) for v in ids), tuple(edges))
    for v in ids:
        d = g.degree(v)
        if d not in (1, 2, 3):
            bad(errors.DEGREE_VIOLATION, f"vertex {v} has degree {d}, allowed 1, 2 or 3")
        elif d > 1 and (g.is_source(v) or g.is_sink(v)):
            kind = "source" if g.is_source(v) else "sink"
            bad(errors.EXTREMUM_DEGREE, f"{kind} {v} has degree {d}, must be 1")

    if not _connected(ids, edges):
        bad(errors.DISCONNECTED, "underlying graph is not connected")

    minimal_set = set(minimal)
    for v in minimal_set:
        if v not in heights:
            bad(errors.UNKNOWN_VERTEX, f"minimal_set references unknown vertex {v!r}")
    if any(o["code"] == errors.UNKNOWN_VERTEX for o in out):
        return out

    outside = [v for v in ids if v not in minimal_set]
    by_height: dict[float, list[str]] = {}
    for v in outside:
        by_height.setdefault(heights[v], []).append(v)
    for h, vs in sorted(by_height.items()):
        if len(vs) > 1:
            bad(errors.DUPLICATE_HEIGHT,
                f"vertices {sorted(vs)} share height {h} outside the minimal set")

    if minimal_set:
        m_levels = {heights[v] for v in minimal_set}
        if len(m_levels) > 1:
            bad(errors.MINIMAL_SET_VIOLATION,
                f"minimal set spans several heights {sorted(m_levels)}")
        else:
            m_level = m_levels.pop()
            low = [v for v in outside if heights[v] <= m_level]
            if low:
                bad(errors.MINIMAL_SET_VIOLATION,
                    f"vertices {sorted(low)} at or below the minimal level {m_level}")
            for v in sorted(minimal_set):
                if not g.is_source(v):
                    bad(errors.MINIMAL_SET_VIOLATION, f"minimal vertex {v} is not a source")
    return out


def validate(doc: dict) -> SMDigraph:
    """Turn a digraph document into a validated SMDigraph or raise with all violations."""
    violations = check(doc)
    if violations:
        raise ValidationError(
            violations[0]["code"],
            "; ".join(v["message"] for v in violations),
            stage="validate",
            details=violations,
        )
    heights = {v["id"]: float(v["height"]) for v in doc["vertices"]}
    edges = tuple(
        Edge(str(e.get("id", f"e{i}")), e["tail"], e["head"])
        for i, e in enumerate(doc.get("edges", []))
    )
    verts = tuple((v["id"], heights[v["id"]]) for v in doc["vertices"])
    return SMDigraph(HeightDigraph(verts, edges), frozenset(doc.get("minimal_set", [])))


def to_doc(g: SMDigraph) -> dict:
    return {
        "vertices": [{"id": v, "height": h} for v, h in g.base.vertices],
        "edges": [{"tail": e.tail, "head": e.head, "id": e.id} for e in g.base.edges],
        "minimal_set": sorted(g.minimal_set),
    }


def betti1(g: HeightDigraph | SMDigraph) -> int:
    base = g.base if isinstance(g, SMDigraph) else g
    return len(base.edges) - len(base.vertices) + 1


def shift_heights(g: SMDigraph, offset: float) -> SMDigraph:
    verts = tuple((v, h + offset) for v, h in g.base.vertices)
    return SMDigraph(HeightDigraph(verts, g.base.edges), g.minimal_set)


def rank_normalize(g: SMDigraph, start: float = 0.0) -> SMDigraph:
    """Remap heights to consecutive integers starting at ``start``.

    Order-preserving, so the digraph isomorphism class is unchanged; gives the
    embedder unit level spacing.  The minimal set (if any) lands at ``start``.
    """
    levels = sorted({h for _, h in g.base.vertices})
    rank = {h: start + i for i, h in enumerate(levels)}
    verts = tuple((v, rank[h]) for v, h in g.base.vertices)
    return SMDigraph(HeightDigraph(verts, g.base.edges), g.minimal_set)


def double(g: SMDigraph) -> DoubledDigraph:
    """Glue a mirror copy along the minimal set.

    Heights are first shifted so the minimum is 0; the mirror copy carries
    negated heights.  Glued points are interior edge points of the result,
    not vertices: the unique edge leaving each minimal vertex merges with its
    reflection into one through-edge.
    """
    if not g.minimal_set:
        raise RoundforgeError(errors.EMPTY_MINIMAL_SET,
                              "double requires a nonempty minimal set", stage="double")
    heights = g.heights()
    m_level = min(heights.values())
    base = shift_heights(g, -m_level)
    heights = base.heights()

    ids = set(base.vertex_ids()) | {e.id for e in base.base.edges}
    suffix = "*"
    while any(x + suffix in ids for x in ids):
        suffix += "*"

    keep = [v for v in base.vertex_ids() if v not in g.minimal_set]
    verts = [(v, heights[v]) for v in keep]
    verts += [(v + suffix, -heights[v]) for v in keep]

    mirror = {v: v + suffix for v in keep}
    mirror.update({v + suffix: v for v in keep})

    new_edges: list[Edge] = []
    axis_edges: dict[str, str] = {}
    for e in base.base.edges:
        if e.tail in g.minimal_set:
            if base.base.degree(e.tail) != 1:
                raise RoundforgeError(
                    errors.MINIMAL_SET_VIOLATION,
                    f"minimal vertex {e.tail} has degree > 1", stage="double")
            new_edges.append(Edge(e.id, e.head + suffix, e.head))
            axis_edges[e.id] = e.tail
        else:
            new_edges.append(Edge(e.id, e.tail, e.head))
            new_edges.append(Edge(e.id + suffix, e.head + suffix, e.tail + suffix))

    verts.sort(key=lambda vh: (vh[1], vh[0]))
    return DoubledDigraph(
        base=HeightDigraph(tuple(verts), tuple(new_edges)),
        minimal_set=frozenset(),
        mirror=mirror,
        axis_edges=axis_edges,
        half=base,
        suffix=suffix,
    )


def _order_key(g: SMDigraph) -> list[list[str]]:
    """Vertices grouped by height level, levels ascending.

    Outside the minimal set all levels are singletons, so a height-order
    preserving bijection is forced up to permutations of the minimal block.
    """
    heights = g.heights()
    levels: dict[float, list[str]] = {}
    for v in g.vertex_ids():
        levels.setdefault(heights[v], []).append(v)
    return [sorted(levels[h]) for h in sorted(levels)]


def is_isomorphic(g1: SMDigraph, g2: SMDigraph) -> dict[str, str] | None:
    """Height-order preserving digraph isomorphism; returns a witness or None.

    The witness maps vertices of g1 to vertices of g2, preserves edges with
    multiplicity, maps minimal set onto minimal set, and preserves the total
    order of heights (the values themselves need not match).
    """
    if len(g1.vertex_ids()) != len(g2.vertex_ids()):
        return None
    if len(g1.edges) != len(g2.edges):
        return None
    if bool(g1.minimal_set) != bool(g2.minimal_set):
        return None
    levels1, levels2 = _order_key(g1), _order_key(g2)
    if [len(x) for x in levels1] != [len(x) for x in levels2]:
        return None

    edges2 = Counter((e.tail, e.head) for e in g2.edges)

    def matches(mapping: dict[str, str]) -> bool:
        mapped = Counter((mapping[e.tail], mapping[e.head]) for e in g1.edges)
        return mapped == edges2

    fixed: dict[str, str] = {}
    blocks: list[tuple[list[str], list[str]]] = []
    for l1, l2 in zip(levels1, levels2):
        if len(l1) == 1:
            fixed[l1[0]] = l2[0]
        else:
            blocks.append((l1, l2))

    # Only the minimal block can be non-singleton; still handle several for
    # robustness on unvalidated input.
    def backtrack(i: int, mapping: dict[str, str]):
        if i == len(blocks):
            if g1.minimal_set and {mapping[v] for v in g1.minimal_set} != set(g2.minimal_set):
                return None
            return mapping if matches(mapping) else None
        l1, l2 = blocks[i]
        for perm in itertools.permutations(l2):
            mapping.update(zip(l1, perm))
            got = backtrack(i + 1, mapping)
            if got is not None:
                return got
        return None

    result = backtrack(0, dict(fixed))
    return dict(result) if result is not None else None


def expected_topology(g: SMDigraph, m: int, mode: str) -> TopologyDescriptor:
    """Diffeomorphism model of the manifold a synthesis run will produce."""
    if m < 4:
        raise RoundforgeError(errors.DIMENSION_TOO_LOW,
                              f"m={m}: need m >= 4", stage="expected_topology")
    if not g.is_realizable():
        raise RoundforgeError(errors.NOT_REALIZABLE,
                              "degrees must all be 1 or 3", stage="expected_topology")
    l = betti1(g)
    if mode in ("disk", "disk-circles"):
        if not g.minimal_set:
            raise RoundforgeError(errors.MODE_MISMATCH,
                                  "disk modes require a nonempty minimal set",
                                  stage="expected_topology")
        return TopologyDescriptor("sphere" if l == 0 else "connected-sum", l, m)
    if mode == "cylinder":
        if g.minimal_set:
            raise RoundforgeError(errors.MODE_MISMATCH,
                                  "cylinder mode requires an empty minimal set",
                                  stage="expected_topology")
        if m == 4 and len(g.edges) < 2:
            return TopologyDescriptor("ambiguous-4d", l, m)
        return TopologyDescriptor("product", l, m)
    raise RoundforgeError(errors.MODE_MISMATCH, f"unknown mode {mode!r}",
                          stage="expected_topology")
