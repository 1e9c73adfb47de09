"""3-edge-coloring with extra "must differ" constraints between edges.

Normalization discards edges with at most two conflicting edges (they can
always be colored last) and rejects vertices of degree >= 4.  A splice on
an unconstrained edge e = uv between two degree-3 vertices removes u, v, e
and joins the remaining four edges in pairs: in any coloring the two other
edges at u use the same two colors as the two at v, so one of the two
pairings is monochromatic.  Splices are enumerated exhaustively and each
residue is 3-colored as the vertex coloring of its conflict graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .cspcore import RuleNotApplicable
from .graphkit import Graph
from .vertexcolor import ColoringStats, solve_list_coloring

PALETTE = (1, 2, 3)


class Unsatisfiable(Exception):
    pass


@dataclass
class EdgeProblem:
    """Multigraph with edge ids plus symmetric edge-difference constraints."""
    edges: dict[int, tuple[int, int]] = field(default_factory=dict)
    cons: dict[int, set[int]] = field(default_factory=dict)

    @classmethod
    def build(cls, edges: Sequence[tuple[int, int]],
              constraints: Iterable[tuple[int, int]] = ()) -> "EdgeProblem":
        prob = cls({i: (u, v) for i, (u, v) in enumerate(edges)},
                   {i: set() for i in range(len(edges))})
        for e, f in constraints:
            if e not in prob.edges or f not in prob.edges:
                raise ValueError(f"constraint on unknown edge {(e, f)}")
            prob.add_constraint(e, f)
        return prob

    def copy(self) -> "EdgeProblem":
        return EdgeProblem(dict(self.edges), {e: set(s) for e, s in self.cons.items()})

    def add_constraint(self, e: int, f: int) -> None:
        self.cons[e].add(f)
        self.cons[f].add(e)

    def incidence(self) -> dict[int, list[int]]:
        inc: dict[int, list[int]] = {}
        for e, (u, v) in self.edges.items():
            inc.setdefault(u, []).append(e)
            if v != u:
                inc.setdefault(v, []).append(e)
        return inc

    def conflicts(self, e: int, inc: dict[int, list[int]] | None = None) -> set[int]:
        inc = inc if inc is not None else self.incidence()
        u, v = self.edges[e]
        out = set(inc.get(u, ())) | set(inc.get(v, ())) | self.cons[e]
        out.discard(e)
        return out

    def remove_edge(self, e: int) -> None:
        for f in self.cons.pop(e):
            self.cons[f].discard(e)
        del self.edges[e]

    def conflict_graph(self) -> tuple[Graph, list[int]]:
        ids = sorted(self.edges)
        index = {e: i for i, e in enumerate(ids)}
        g = Graph(range(len(ids)))
        inc = self.incidence()
        for e in ids:
            for f in self.conflicts(e, inc):
                if index[f] > index[e]:
                    g.add_edge(index[e], index[f])
        return g, ids


@dataclass
class Pop:
    edge: int
    conflicts: tuple[int, ...]


@dataclass
class Splice:
    edge: int
    pairs: tuple[tuple[int, int, int], tuple[int, int, int]]  # (new, old1, old2) twice


def normalize(prob: EdgeProblem, trail: list) -> None:
    """Drop removable edges in place; raise Unsatisfiable on evident failure."""
    while True:
        inc = prob.incidence()
        if any(len(es) >= 4 for es in inc.values()):
            raise Unsatisfiable("vertex of degree >= 4")
        for e, (u, v) in prob.edges.items():
            if u == v or e in prob.cons[e]:
                raise Unsatisfiable(f"edge {e} conflicts with itself")
        victim = next((e for e in sorted(prob.edges) if len(prob.conflicts(e, inc)) <= 2), None)
        if victim is None:
            return
        trail.append(Pop(victim, tuple(sorted(prob.conflicts(victim, inc)))))
        prob.remove_edge(victim)


def splice_sides(prob: EdgeProblem, e: int, inc: dict[int, list[int]] | None = None):
    """``((a, x), (b, y)), ((c, z), (d, w))`` for a spliceable e, else None."""
    inc = inc if inc is not None else prob.incidence()
    if prob.cons[e]:
        return None
    u, v = prob.edges[e]
    if u == v or len(inc.get(u, ())) != 3 or len(inc.get(v, ())) != 3:
        return None
    sides = []
    for end in (u, v):
        others = [f for f in inc[end] if f != e]
        if len(others) != 2:
            return None
        side = []
        for f in others:
            p, q = prob.edges[f]
            far = q if p == end else p
            if far in (u, v):
                return None
            side.append((f, far))
        sides.append(tuple(side))
    return tuple(sides)


def splice(prob: EdgeProblem, e: int, crossed: bool, trail: list, next_id: int) -> int:
    """Apply one splice in place.  Returns the next free edge id."""
    (a, x), (b, y) = splice_sides(prob, e)[0]
    (c, z), (d, w) = splice_sides(prob, e)[1]
    if crossed:
        (c, z), (d, w) = (d, w), (c, z)
    new1, new2 = next_id, next_id + 1
    inherited = {new1: (prob.cons[a] | prob.cons[c]), new2: (prob.cons[b] | prob.cons[d])}
    for f in (e, a, b, c, d):
        prob.remove_edge(f)
    prob.edges[new1] = (x, z)
    prob.edges[new2] = (y, w)
    prob.cons[new1], prob.cons[new2] = set(), set()
    for new, old in inherited.items():
        for f in old - {e, a, b, c, d}:
            prob.add_constraint(new, f)
        if old & ({a, c} if new == new1 else {b, d}):
            prob.add_constraint(new, new)
    prob.add_constraint(new1, new2)
    trail.append(Splice(e, ((new1, a, c), (new2, b, d))))
    return next_id + 2


def splice_children(prob: EdgeProblem, e: int) -> tuple[EdgeProblem, EdgeProblem]:
    """The straight and crossed splices of e as new instances."""
    if e not in prob.edges or splice_sides(prob, e) is None:
        raise RuleNotApplicable(f"edge {e} cannot be spliced")
    nid = max(prob.edges) + 1
    out = []
    for crossed in (False, True):
        child = prob.copy()
        splice(child, e, crossed, [], nid)
        out.append(child)
    return out[0], out[1]


def neighbor_counts(prob: EdgeProblem) -> tuple[int, int]:
    """``(m3, m4)``: edges with exactly three and exactly four adjacent edges."""
    inc = prob.incidence()
    m3 = m4 = 0
    for u, v in prob.edges.values():
        k = len(inc[u]) + len(inc[v]) - 2
        m3 += k == 3
        m4 += k == 4
    return m3, m4


def select_splices(prob: EdgeProblem) -> list[int]:
    """Spliceable edges whose five-edge regions are pairwise disjoint.

    Greedy by fewest overlapping candidates (ties by edge id), which keeps
    the selection maximal; the m4/3 target is reported, not guaranteed.
    """
    inc = prob.incidence()
    regions = {}
    for e in sorted(prob.edges):
        sides = splice_sides(prob, e, inc)
        if sides is not None:
            regions[e] = {e} | {f for side in sides for f, _ in side}
    overlaps = {e: {f for f in regions if f != e and regions[e] & regions[f]} for e in regions}
    chosen = []
    live = set(regions)
    while live:
        e = min(live, key=lambda x: (len(overlaps[x] & live), x))
        chosen.append(e)
        live -= overlaps[e] | {e}
    return sorted(chosen)


def replay(trail: list, coloring: dict[int, int]) -> dict[int, int]:
    col = dict(coloring)
    for step in reversed(trail):
        if isinstance(step, Pop):
            used = {col[f] for f in step.conflicts}
            col[step.edge] = next(c for c in PALETTE if c not in used)
        else:
            seen = set()
            for new, o1, o2 in step.pairs:
                col[o1] = col[o2] = col[new]
                seen.add(col[new])
            col[step.edge] = next(c for c in PALETTE if c not in seen)
    return col


@dataclass
class EdgeStats:
    splices: int = 0
    m3: int = 0
    m4: int = 0
    children: int = 0
    residue_edges: list = field(default_factory=list)
    vertex: ColoringStats = field(default_factory=ColoringStats)

    def as_dict(self) -> dict:
        return {"splices": self.splices, "splice_target": self.m4 / 3, "m3": self.m3, "m4": self.m4,
                "children": self.children,
                "max_residue_edges": max(self.residue_edges, default=0),
                "csp_calls": self.vertex.csp_calls}


def _color_residue(prob: EdgeProblem, stats: EdgeStats) -> dict[int, int] | None:
    stats.residue_edges.append(len(prob.edges))
    if not prob.edges:
        return {}
    g, ids = prob.conflict_graph()
    sol = solve_list_coloring(g, stats=stats.vertex)
    if sol is None:
        return None
    return {ids[i]: c for i, c in sol.items()}


def is_edge_coloring(edges: Sequence[tuple[int, int]], constraints: Iterable[tuple[int, int]],
                     coloring: dict[int, int]) -> bool:
    if set(coloring) != set(range(len(edges))) or any(c not in PALETTE for c in coloring.values()):
        return False
    prob = EdgeProblem.build(edges, constraints)
    inc = prob.incidence()
    return all(coloring[e] != coloring[f] for e in prob.edges for f in prob.conflicts(e, inc))


def solve_3edge(edges: Sequence[tuple[int, int]], constraints: Iterable[tuple[int, int]] = (),
                stats: EdgeStats | None = None) -> dict[int, int] | None:
    """Proper 3-edge-coloring respecting ``constraints`` (pairs of edge indices), or None."""
    constraints = list(constraints)
    stats = stats if stats is not None else EdgeStats()
    root = EdgeProblem.build(edges, constraints)
    trail: list = []
    try:
        normalize(root, trail)
    except Unsatisfiable:
        return None
    chosen = select_splices(root)
    stats.splices = len(chosen)
    stats.m3, stats.m4 = neighbor_counts(root)
    start = max(len(edges), max(root.edges, default=-1) + 1)
    for pattern in product((False, True), repeat=len(chosen)):
        stats.children += 1
        child, ctrail, nid = root.copy(), list(trail), start
        try:
            for e, crossed in zip(chosen, pattern):
                if splice_sides(child, e) is None:
                    raise Unsatisfiable("splice region changed")
                nid = splice(child, e, crossed, ctrail, nid)
            normalize(child, ctrail)
        except Unsatisfiable:
            continue
        sol = _color_residue(child, stats)
        if sol is None:
            continue
        full = replay(ctrail, sol)
        out = {e: full[e] for e in range(len(edges))}
        if not is_edge_coloring(edges, constraints, out):
            raise AssertionError("back-mapped edge coloring is invalid")
        return out
    return None


def brute_force_edge_coloring(edges: Sequence[tuple[int, int]],
                              constraints: Iterable[tuple[int, int]] = ()) -> dict[int, int] | None:
    prob = EdgeProblem.build(edges, constraints)
    inc = prob.incidence()
    if any(u == v for u, v in edges):
        return None
    conf = {e: prob.conflicts(e, inc) for e in prob.edges}
    col: dict[int, int] = {}

    def rec(i: int) -> bool:
        if i == len(edges):
            return True
        for c in PALETTE:
            if all(col.get(f) != c for f in conf[i]):
                col[i] = c
                if rec(i + 1):
                    return True
                del col[i]
        return False

    return dict(col) if rec(0) else None
