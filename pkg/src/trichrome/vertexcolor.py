"""3-coloring by coloring a small, well-connected vertex set first.

Pipeline: peel vertices of degree < 3, branch away cycles and large trees
of degree-3 vertices, grow a maximal bushy forest, cover what remains by
height-two trees (claw packing plus an integral flow), then enumerate the
colorings of the selected set S and hand each residue to the CSP solver.
The structural phases only affect cost; the enumeration is exhaustive over
S-colorings, so the verdict is exact for any choice of S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import cspsolver
from .cspcore import ContractViolation, from_graph_coloring
from .graphkit import FlowNetwork, Graph, k13_packing, max_flow_integer
from .workfactor import LAMBDA

PALETTE = (1, 2, 3)
Coloring = dict[int, int]


class CoverError(RuntimeError):
    pass


# -- helpers ------------------------------------------------------------------------

def _full_lists(graph: Graph) -> dict[int, set[int]]:
    return {v: set(PALETTE) for v in graph.vertices}


def is_proper_coloring(graph: Graph, coloring: Mapping[int, int],
                       lists: Mapping[int, Iterable[int]] | None = None) -> bool:
    for v in graph.vertices:
        if v not in coloring:
            return False
        allowed = set(lists[v]) if lists is not None else set(PALETTE)
        if coloring[v] not in allowed:
            return False
    return all(coloring[u] != coloring[v] for u, v in graph.edges())


def brute_force_coloring(graph: Graph, lists: Mapping[int, Iterable[int]] | None = None
                         ) -> Coloring | None:
    """Exhaustive backtracking over vertices in label order."""
    order = graph.vertices
    doms = {v: sorted(lists[v]) if lists is not None else list(PALETTE) for v in order}
    col: Coloring = {}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for c in doms[v]:
            if all(col.get(w) != c for w in graph.adj[v]):
                col[v] = c
                if rec(i + 1):
                    return True
                del col[v]
        return False

    return dict(col) if rec(0) else None


def peel_low_degree(graph: Graph, lists: Mapping[int, Iterable[int]] | None = None
                    ) -> tuple[Graph, dict[int, set[int]], list[int]]:
    """Repeatedly drop vertices with more list colors than neighbors.

    Returns ``(core, core_lists, removed)``; ``removed`` is in removal order
    and can always be colored greedily in reverse.
    """
    core = graph.copy()
    cur = {v: set(lists[v]) for v in graph.vertices} if lists is not None else _full_lists(graph)
    removed: list[int] = []
    queue = sorted(core.vertices)
    while queue:
        nxt = []
        for v in queue:
            if v in core and len(cur[v]) > core.degree(v):
                nb = core.neighbors(v)
                core.remove_vertex(v)
                removed.append(v)
                nxt.extend(nb)
        queue = sorted(set(w for w in nxt if w in core))
    return core, {v: cur[v] for v in core.vertices}, removed


def extend_greedily(graph: Graph, coloring: Coloring, removed: list[int],
                    lists: Mapping[int, Iterable[int]] | None = None) -> Coloring:
    col = dict(coloring)
    for v in reversed(removed):
        allowed = sorted(lists[v]) if lists is not None else list(PALETTE)
        used = {col[w] for w in graph.adj[v] if w in col}
        col[v] = next(c for c in allowed if c not in used)
    return col


# -- degree-3 structures ----------------------------------------------------------

@dataclass
class ListBranch:
    graph: Graph
    lists: dict[int, set[int]]
    fixed: Coloring
    decrement: int


def degree3_structure(graph: Graph) -> tuple[str, list[int]] | None:
    """First cycle-containing or >= 8-vertex component among degree-3 vertices."""
    deg3 = [v for v in graph.vertices if graph.degree(v) == 3]
    sub = graph.induced(deg3)
    for comp in sub.components():
        m = sum(len(sub.adj[v]) for v in comp) // 2
        if m >= len(comp):
            return "cycle", comp
        if len(comp) >= 8:
            return "tree", comp
    return None


def _two_core(graph: Graph, vertices: list[int]) -> list[int]:
    g = graph.induced(vertices)
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if g.degree(v) <= 1:
                g.remove_vertex(v)
                changed = True
    return g.vertices


def reduce_degree3_structures(graph: Graph, lists: Mapping[int, Iterable[int]] | None = None
                              ) -> list[ListBranch] | None:
    """Branch on one vertex of a degree-3 cycle or large degree-3 tree.

    Each child colors the pivot, deletes it, and removes that color from
    the neighbors' lists.  None certifies that the degree-3 vertices form
    trees of at most seven vertices.
    """
    found = degree3_structure(graph)
    if found is None:
        return None
    kind, comp = found
    if kind == "cycle":
        pivot = min(_two_core(graph, comp))
    else:
        sub = graph.induced(comp)
        pivot = max(comp, key=lambda v: (sub.degree(v), -v))
    cur = {v: set(lists[v]) for v in graph.vertices} if lists is not None else _full_lists(graph)
    three_before = sum(1 for v in graph.vertices if len(cur[v]) == 3)
    branches = []
    for c in sorted(cur[pivot]):
        child = graph.without([pivot])
        child_lists = {v: set(cur[v]) for v in child.vertices}
        for w in graph.adj[pivot]:
            child_lists[w].discard(c)
        three_after = sum(1 for v in child.vertices if len(child_lists[v]) == 3)
        branches.append(ListBranch(child, child_lists, {pivot: c}, three_before - three_after))
    return branches


# -- bushy forest -------------------------------------------------------------------

@dataclass
class BushyTree:
    root: int
    parent: dict[int, int | None]
    internal: list[int]

    @property
    def vertices(self) -> list[int]:
        return list(self.parent)

    @property
    def leaves(self) -> list[int]:
        inner = set(self.internal)
        return [v for v in self.parent if v not in inner]

    def tree_degree(self, v: int) -> int:
        kids = sum(1 for w, p in self.parent.items() if p == v)
        return kids + (self.parent[v] is not None)


@dataclass
class BushyForest:
    trees: list[BushyTree] = field(default_factory=list)

    @property
    def vertices(self) -> set[int]:
        return {v for t in self.trees for v in t.parent}

    @property
    def internal(self) -> list[int]:
        return [v for t in self.trees for v in t.internal]

    @property
    def leaves(self) -> list[int]:
        return [v for t in self.trees for v in t.leaves]

    @property
    def roots(self) -> list[int]:
        return [t.root for t in self.trees]


def find_bushy_forest(graph: Graph, check_precondition: bool = True) -> BushyForest:
    """Greedy maximal bushy forest.

    Leaves are promoted while they have three or more neighbors outside the
    forest (giving them tree degree >= 4); when no leaf can grow, a new tree
    is rooted at a vertex with four or more outside neighbors.
    """
    if check_precondition and degree3_structure(graph) is not None:
        raise ContractViolation("degree-3 cycles or large degree-3 trees remain")
    forest = BushyForest()
    used: set[int] = set()
    while True:
        grew = False
        for tree in forest.trees:
            for leaf in sorted(tree.leaves):
                outside = [w for w in graph.neighbors(leaf) if w not in used]
                if len(outside) >= 3:
                    tree.internal.append(leaf)
                    for w in outside:
                        tree.parent[w] = leaf
                        used.add(w)
                    grew = True
        if grew:
            continue
        root = next((v for v in graph.vertices if v not in used
                     and sum(1 for w in graph.adj[v] if w not in used) >= 4), None)
        if root is None:
            return forest
        outside = [w for w in graph.neighbors(root) if w not in used]
        tree = BushyTree(root, {root: None}, [root])
        used.add(root)
        for w in outside:
            tree.parent[w] = root
            used.add(w)
        forest.trees.append(tree)


def check_bushy_forest(graph: Graph, forest: BushyForest) -> list[str]:
    """Structural problems with ``forest`` (empty list when valid and maximal)."""
    problems = []
    seen: set[int] = set()
    for tree in forest.trees:
        verts = set(tree.parent)
        if seen & verts:
            problems.append(f"tree at {tree.root} overlaps another tree")
        seen |= verts
        for v, p in tree.parent.items():
            if p is not None and not graph.has_edge(v, p):
                problems.append(f"tree edge {p}-{v} is not a graph edge")
        for v in tree.internal:
            if tree.tree_degree(v) < 4:
                problems.append(f"internal vertex {v} has tree degree {tree.tree_degree(v)}")
    for v in graph.vertices:
        if v not in seen and sum(1 for w in graph.adj[v] if w not in seen) >= 4:
            problems.append(f"vertex {v} could root a new tree")
    for v in forest.leaves:
        if sum(1 for w in graph.adj[v] if w not in seen) >= 3:
            problems.append(f"leaf {v} could be promoted")
    return problems


# -- height-two forest --------------------------------------------------------------

@dataclass
class HeightTwoTree:
    root: int
    children: tuple[int, int, int]
    grandchildren: dict[int, int]  # grandchild -> child it hangs from
    capacity: int

    @property
    def vertices(self) -> list[int]:
        return [self.root, *self.children, *sorted(self.grandchildren)]


@dataclass
class HeightTwoForest:
    trees: list[HeightTwoTree] = field(default_factory=list)

    @property
    def vertices(self) -> set[int]:
        return {v for t in self.trees for v in t.vertices}


def _adjacent_to(graph: Graph, v: int, group: set[int]) -> bool:
    return not graph.adj[v].isdisjoint(group)


def build_height2_forest(graph: Graph, forest: BushyForest) -> HeightTwoForest:
    """Cover the vertices far from the bushy forest by disjoint height-two trees.

    Claws packed in G minus F become height-one trees; each remaining vertex
    not adjacent to F is routed to one tree through an integral maximum flow
    with tree capacities 5 (tree holds a vertex of degree >= 4) or 3.
    """
    in_f = forest.vertices
    outside = [v for v in graph.vertices if v not in in_f]
    claws = k13_packing(graph.induced(outside))
    covered = {v for c, leaves in claws for v in (c, *leaves)}
    pending = [v for v in outside if v not in covered and not _adjacent_to(graph, v, in_f)]
    k = len(claws)
    net = FlowNetwork(num_nodes=k + len(pending) + 2, source=0, sink=k + len(pending) + 1)
    caps = []
    hang: dict[tuple[int, int], int] = {}
    arc_of: dict[int, tuple[int, int]] = {}
    for i, (center, leaves) in enumerate(claws):
        cap = 5 if any(graph.degree(v) >= 4 for v in (center, *leaves)) else 3
        caps.append(cap)
        net.add_arc(0, 1 + i, cap)
    for j, g in enumerate(pending):
        for i, (center, leaves) in enumerate(claws):
            parents = [x for x in leaves if graph.has_edge(x, g)]
            if parents:
                hang[(i, g)] = parents[0]
                arc_of[net.add_arc(1 + i, 1 + k + j, 1)] = (i, g)
        net.add_arc(1 + k + j, net.sink, 1)
    value, flow = max_flow_integer(net)
    if value < len(pending):
        raise CoverError(f"only {value} of {len(pending)} far vertices can be attached to claws")
    trees = [HeightTwoTree(c, tuple(leaves), {}, cap) for (c, leaves), cap in zip(claws, caps)]
    for a, (i, g) in arc_of.items():
        if flow[a]:
            trees[i].grandchildren[g] = hang[(i, g)]
    return HeightTwoForest(trees)


def check_height2_forest(graph: Graph, forest: BushyForest, h2: HeightTwoForest) -> list[str]:
    problems = []
    in_f = forest.vertices
    seen: set[int] = set()
    for t in h2.trees:
        verts = set(t.vertices)
        if len(verts) != len(t.vertices) or seen & verts or in_f & verts:
            problems.append(f"tree at {t.root} is not disjoint")
        seen |= verts
        if not all(graph.has_edge(t.root, c) for c in t.children):
            problems.append(f"tree at {t.root} has a non-edge to a child")
        for g, c in t.grandchildren.items():
            if c not in t.children or not graph.has_edge(g, c):
                problems.append(f"grandchild {g} is not attached to a child")
        if len(t.grandchildren) > 5:
            problems.append(f"tree at {t.root} has {len(t.grandchildren)} grandchildren")
        if len(t.grandchildren) >= 4 and not any(graph.degree(v) >= 4 for v in t.vertices):
            problems.append(f"tree at {t.root} has >= 4 grandchildren but no degree-4 vertex")
    for v in graph.vertices:
        if v not in in_f and v not in seen and not _adjacent_to(graph, v, in_f):
            problems.append(f"vertex {v} is far from F and uncovered")
    return problems


# -- choosing S and accounting --------------------------------------------------------

def select_tree_vertices(graph: Graph, tree: HeightTwoTree, lam: float = LAMBDA) -> list[int]:
    """Color the root (children drop to two colors) or the three children
    (root and grandchildren drop to two colors), whichever predicts less work."""
    kids = tree.children
    sub = graph.induced(kids)
    cost_root = 3 * lam ** len(tree.grandchildren)
    cost_kids = sum(1 for a in PALETTE for b in PALETTE for c in PALETTE
                    if is_proper_coloring(sub, dict(zip(kids, (a, b, c)))))
    return [tree.root] if cost_root <= cost_kids else list(kids)


@dataclass
class ForestAccounting:
    p: int
    q: int
    r: int
    s: int
    t: int

    @property
    def n(self) -> int:
        return self.p + self.q + self.r + self.s + self.t

    def predicted_cost(self, lam: float = LAMBDA) -> float:
        return 3 ** self.p * 2 ** self.q * lam ** self.s * (3 * lam ** 3) ** (self.t / 7)

    def per_vertex_base(self, lam: float = LAMBDA) -> float:
        return self.predicted_cost(lam) ** (1 / self.n) if self.n else 1.0

    def constraint_violations(self) -> list[str]:
        out = []
        if 4 * self.p + 2 * self.q > self.r:
            out.append("4p + 2q > r")
        if self.s > 2 * self.r:
            out.append("s > 2r")
        if 3 * (self.s + self.t) > 20 * self.r:
            out.append("s + t > 20r/3")
        return out


def predicted_base(p: float, q: float, r: float, s: float, t: float, lam: float = LAMBDA) -> float:
    """(3^p 2^q lam^s (3 lam^3)^(t/7))^(1/n) for real-valued counts."""
    n = p + q + r + s + t
    log_cost = p * math.log(3) + q * math.log(2) + s * math.log(lam) + t / 7 * math.log(3 * lam ** 3)
    return math.exp(log_cost / n)


def accounting(graph: Graph, forest: BushyForest, h2: HeightTwoForest | None = None) -> ForestAccounting:
    p = len(forest.trees)
    q = len(forest.internal) - p
    leaves = set(forest.leaves)
    in_f = forest.vertices
    s = sum(1 for v in graph.vertices if v not in in_f and _adjacent_to(graph, v, leaves))
    r = len(leaves)
    return ForestAccounting(p, q, r, s, len(graph) - p - q - r - s)


# -- enumeration -----------------------------------------------------------------

@dataclass
class ColoringStats:
    enumerations: int = 0
    csp_calls: int = 0
    degree3_branches: int = 0
    cover_failures: int = 0
    covers: list = field(default_factory=list)  # (ForestAccounting, problems) per produced cover

    def as_dict(self) -> dict:
        out = {"enumerations": self.enumerations, "csp_calls": self.csp_calls,
               "degree3_branches": self.degree3_branches, "cover_failures": self.cover_failures,
               "covers": len(self.covers)}
        if self.covers:
            acc = self.covers[0][0]
            out.update({"p": acc.p, "q": acc.q, "r": acc.r, "s": acc.s, "t": acc.t,
                        "predicted_base": round(acc.per_vertex_base(), 6)})
        return out


def selected_set(graph: Graph, forest: BushyForest, h2: HeightTwoForest | None) -> list[int]:
    """S in enumeration order: each bushy tree's internal vertices parent-first, then tree picks."""
    order = list(forest.internal)
    if h2 is not None:
        for tree in h2.trees:
            order.extend(select_tree_vertices(graph, tree))
    return order


def solve_list_coloring(graph: Graph, lists: Mapping[int, Iterable[int]] | None = None,
                        stats: ColoringStats | None = None) -> Coloring | None:
    """List 3-coloring through the CSP translation (lists of at most three colors)."""
    lists = {v: set(lists[v]) for v in graph.vertices} if lists is not None else _full_lists(graph)
    if any(not lists[v] for v in graph.vertices):
        return None
    core, core_lists, removed = peel_low_degree(graph, lists)
    sol, st = cspsolver.solve(from_graph_coloring(core, core_lists))
    if stats is not None:
        stats.csp_calls += st.calls
    if sol is None:
        return None
    return extend_greedily(graph, sol, removed, lists)


def enumerate_and_solve(graph: Graph, forest: BushyForest, h2: HeightTwoForest | None,
                        lists: Mapping[int, Iterable[int]] | None = None,
                        stats: ColoringStats | None = None) -> Coloring | None:
    """Try every proper coloring of S; solve each residue as a list-coloring CSP."""
    stats = stats if stats is not None else ColoringStats()
    base = {v: set(lists[v]) for v in graph.vertices} if lists is not None else _full_lists(graph)
    order = selected_set(graph, forest, h2)
    s_set = set(order)
    residue = graph.without(s_set)
    col: Coloring = {}

    def attempt() -> Coloring | None:
        stats.enumerations += 1
        rl = {}
        for v in residue.vertices:
            rl[v] = base[v] - {col[w] for w in graph.adj[v] if w in col}
            if not rl[v]:
                return None
        sol = solve_list_coloring(residue, rl, stats)
        return None if sol is None else {**col, **sol}

    def rec(i: int) -> Coloring | None:
        if i == len(order):
            return attempt()
        v = order[i]
        for c in sorted(base[v]):
            if all(col.get(w) != c for w in graph.adj[v]):
                col[v] = c
                found = rec(i + 1)
                del col[v]
                if found is not None:
                    return found
        return None

    return rec(0)


# -- top level ------------------------------------------------------------------

@dataclass
class ColoringResult:
    coloring: Coloring | None
    stats: ColoringStats


def solve_3coloring(graph: Graph) -> ColoringResult:
    """Exact 3-coloring; a returned coloring is verified proper."""
    stats = ColoringStats()
    core, _, removed = peel_low_degree(graph)
    branches = reduce_degree3_structures(core)
    sol = None
    if branches is not None:
        stats.degree3_branches += len(branches)
        for b in branches:
            sub = solve_list_coloring(b.graph, b.lists, stats)
            if sub is not None:
                sol = {**sub, **b.fixed}
                break
    else:
        forest = find_bushy_forest(core, check_precondition=False)
        try:
            h2 = build_height2_forest(core, forest)
        except CoverError:
            stats.cover_failures += 1
            h2 = None
        else:
            problems = check_bushy_forest(core, forest) + check_height2_forest(core, forest, h2)
            acc = accounting(core, forest, h2)
            stats.covers.append((acc, problems + acc.constraint_violations()))
        sol = enumerate_and_solve(core, forest, h2, stats=stats)
    if sol is None:
        return ColoringResult(None, stats)
    full = extend_greedily(graph, sol, removed)
    if not is_proper_coloring(graph, full):
        raise AssertionError("pipeline produced an improper coloring")
    return ColoringResult(full, stats)


def format_coloring(coloring: Coloring) -> str:
    return "".join(f"{v + 1} {c}\n" for v, c in sorted(coloring.items()))
