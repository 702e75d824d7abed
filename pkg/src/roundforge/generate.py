"""Digraph generators: random valid instances and exhaustive small catalogs.

The random generator simulates a height sweep: at each integer level one event
happens (birth of a new strand at a degree-1 source, split, merge, or death at
a degree-1 sink), with component tracking so the result is connected.  This
produces exactly the degree-1/3 digraphs the synthesis pipeline accepts.
"""

from __future__ import annotations

import itertools

import numpy as np

from roundforge.digraph import SMDigraph, check, validate


class _Builder:
    def __init__(self):
        self.vertices: list[dict] = []
        self.edges: list[dict] = []
        self.minimal: list[str] = []
        self._v = 0
        self._e = 0

    def vertex(self, height: float) -> str:
        vid = f"v{self._v}"
        self._v += 1
        self.vertices.append({"id": vid, "height": height})
        return vid

    def edge(self, tail: str, head: str) -> str:
        eid = f"e{self._e}"
        self._e += 1
        self.edges.append({"tail": tail, "head": head, "id": eid})
        return eid

    def doc(self) -> dict:
        return {"vertices": self.vertices, "edges": self.edges,
                "minimal_set": self.minimal}


def random_digraph(rng: np.random.Generator, saddles: int | None = None,
                   minimal: int = 0) -> SMDigraph:
    """Random valid digraph with all degrees 1 or 3.

    ``minimal`` > 0 starts that many sources together at level 0 (bounded
    type); 0 gives a closed-type digraph.  ``saddles`` bounds the number of
    degree-3 vertices (default: drawn in 0..6).
    """
    if saddles is None:
        saddles = int(rng.integers(0, 7))
    b = _Builder()
    # open strand -> (source vertex of its edge, component id)
    strands: dict[int, tuple[str, int]] = {}
    comp_parent: dict[int, int] = {}
    next_strand = 0
    level = 0.0

    def find(c: int) -> int:
        while comp_parent[c] != c:
            comp_parent[c] = comp_parent[comp_parent[c]]
            c = comp_parent[c]
        return c

    def open_strand(origin: str, comp: int) -> None:
        nonlocal next_strand
        strands[next_strand] = (origin, comp)
        next_strand += 1

    def birth(h: float) -> str:
        nonlocal level
        v = b.vertex(h)
        c = len(comp_parent)
        comp_parent[c] = c
        open_strand(v, c)
        return v

    if minimal > 0:
        for _ in range(minimal):
            b.minimal.append(birth(0.0))
        level = 1.0
    else:
        birth(0.0)
        level = 1.0

    remaining = saddles
    while True:
        live = sorted(strands)
        comps = {find(strands[s][1]) for s in live}
        n = len(live)
        moves: list[str] = []
        if n == 1 and len(comps) == 1 and remaining == 0:
            moves = ["death"]
        else:
            if remaining > 0:
                if n >= 1:
                    moves.append("split")
                if n >= 2:
                    moves.append("merge")
                    moves.append("merge")  # weight merges up so strands drain
            # a strand may die if its component keeps another strand
            comp_count: dict[int, int] = {}
            for s in live:
                c = find(strands[s][1])
                comp_count[c] = comp_count.get(c, 0) + 1
            if any(comp_count[find(strands[s][1])] > 1 for s in live):
                moves.append("death")
            if not moves:
                # stuck: strands in distinct components with no saddle budget
                moves = ["merge"] if n >= 2 else ["death"]

        move = moves[int(rng.integers(0, len(moves)))]
        if move == "death":
            cands = [s for s in live]
            if n > 1 or len(comps) > 1:
                comp_count = {}
                for s in live:
                    c = find(strands[s][1])
                    comp_count[c] = comp_count.get(c, 0) + 1
                cands = [s for s in live if comp_count[find(strands[s][1])] > 1]
                if not cands:
                    cands = live
            s = cands[int(rng.integers(0, len(cands)))]
            origin, _ = strands.pop(s)
            v = b.vertex(level)
            b.edge(origin, v)
            level += 1.0
            if not strands:
                break
        elif move == "split":
            s = live[int(rng.integers(0, n))]
            origin, c = strands.pop(s)
            v = b.vertex(level)
            b.edge(origin, v)
            open_strand(v, find(c))
            open_strand(v, find(c))
            remaining -= 1
            level += 1.0
        else:  # merge
            i, j = rng.choice(n, size=2, replace=False)
            s1, s2 = live[int(i)], live[int(j)]
            o1, c1 = strands.pop(s1)
            o2, c2 = strands.pop(s2)
            v = b.vertex(level)
            b.edge(o1, v)
            b.edge(o2, v)
            comp_parent[find(c1)] = find(c2)
            open_strand(v, find(c2))
            if remaining > 0:
                remaining -= 1
            level += 1.0

    return validate(b.doc())


def _edge_docs(mults: dict[tuple[int, int], int], names: list[str]) -> list[dict]:
    out = []
    k = 0
    for (i, j), m in sorted(mults.items()):
        for _ in range(m):
            out.append({"tail": names[i], "head": names[j], "id": f"e{k}"})
            k += 1
    return out


def enumerate_digraphs(max_vertices: int) -> list[SMDigraph]:
    """All valid digraphs with up to ``max_vertices`` vertices, exhaustively.

    Heights are taken as ranks (only the order matters for isomorphism);
    bounded-type variants put the lowest k vertices together at level 0 as the
    minimal set.  Multi-edges up to multiplicity 2 per ordered pair (degree 3
    cannot accommodate more on a valid vertex).
    """
    found: list[SMDigraph] = []
    for n in range(1, max_vertices + 1):
        names = [f"v{i}" for i in range(n)]
        for n_min in range(0, n):  # 0 = closed type, else minimal block size
            if n_min == 1:
                heights = [0.0] + [float(i) for i in range(1, n)]
            elif n_min > 1:
                heights = [0.0] * n_min + [float(i) for i in range(1, n - n_min + 1)]
            else:
                heights = [float(i) for i in range(n)]
            pairs = [(i, j) for i in range(n) for j in range(n)
                     if heights[i] < heights[j]]
            deg = [0] * n

            def rec(idx: int, mults: dict):
                if idx == len(pairs):
                    doc = {
                        "vertices": [{"id": names[i], "height": heights[i]}
                                     for i in range(n)],
                        "edges": _edge_docs(mults, names),
                        "minimal_set": names[:n_min],
                    }
                    if not check(doc):
                        found.append(validate(doc))
                    return
                i, j = pairs[idx]
                cap = min(2, 3 - deg[i], 3 - deg[j])
                for m in range(0, cap + 1):
                    if m:
                        mults[(i, j)] = m
                        deg[i] += m
                        deg[j] += m
                    rec(idx + 1, mults)
                    if m:
                        del mults[(i, j)]
                        deg[i] -= m
                        deg[j] -= m

            rec(0, {})
    return found
