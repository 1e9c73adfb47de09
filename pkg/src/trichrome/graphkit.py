"""Graphs and the combinatorial subroutines used by the coloring solvers.

Simple undirected graphs, bipartite matching by augmenting paths, integral
maximum flow by shortest augmenting paths, and packings of vertex-disjoint
K_{1,3} subgraphs (claws).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence


class GraphFormatError(ValueError):
    """Malformed DIMACS-like graph text.  ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class Graph:
    """Simple undirected graph on integer vertex labels.

    Labels need not be contiguous: subgraphs keep the labels of the parent.
    """

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        self.adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            self.add_edge(u, v)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(range(n), edges)

    def add_vertex(self, v: int) -> None:
        self.adj.setdefault(v, set())

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        self.adj.setdefault(u, set()).add(v)
        self.adj.setdefault(v, set()).add(u)

    def remove_vertex(self, v: int) -> None:
        for w in self.adj.pop(v):
            self.adj[w].discard(v)

    def copy(self) -> "Graph":
        g = Graph()
        g.adj = {v: set(nb) for v, nb in self.adj.items()}
        return g

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        g = Graph()
        g.adj = {v: self.adj[v] & keep for v in sorted(keep)}
        return g

    def without(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        return self.induced(v for v in self.adj if v not in drop)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def max_degree(self) -> int:
        return max((len(nb) for nb in self.adj.values()), default=0)

    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(sorted(comp))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={len(self)}, m={self.num_edges()})"


# -- named graphs used across tests and demos --------------------------------

def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


# -- DIMACS-like text format --------------------------------------------------

def parse_dimacs_graph(text: str, extra: dict | None = None) -> Graph:
    """Parse ``p edge n m`` / ``e u v`` text (1-indexed) into a 0-indexed Graph.

    ``extra`` maps additional line tags (for example ``"d"`` or ``"l"``) to
    callables ``fn(tokens, lineno)``; unknown tags are rejected.
    """
    extra = extra or {}
    graph = None
    declared_m = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "p":
            if graph is not None:
                raise GraphFormatError("duplicate problem line", lineno)
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise GraphFormatError("expected 'p edge <n> <m>'", lineno)
            n, declared_m = _ints(tokens[2:], lineno)
            if n < 0 or declared_m < 0:
                raise GraphFormatError("negative counts", lineno)
            graph = Graph(range(n))
        elif graph is None:
            raise GraphFormatError("data before problem line", lineno)
        elif tag == "e":
            if len(tokens) != 3:
                raise GraphFormatError("expected 'e <u> <v>'", lineno)
            u, v = _ints(tokens[1:], lineno)
            if not (1 <= u <= len(graph) and 1 <= v <= len(graph)):
                raise GraphFormatError(f"vertex out of range in edge {u} {v}", lineno)
            if u == v:
                raise GraphFormatError("self-loop", lineno)
            graph.add_edge(u - 1, v - 1)
        elif tag in extra:
            extra[tag](tokens, lineno)
        else:
            raise GraphFormatError(f"unknown line tag {tag!r}", lineno)
    if graph is None:
        raise GraphFormatError("missing problem line")
    return graph


def format_dimacs_graph(graph: Graph, comments: Sequence[str] = ()) -> str:
    index = {v: i + 1 for i, v in enumerate(graph.vertices)}
    lines = [f"c {c}" for c in comments]
    lines.append(f"p edge {len(graph)} {graph.num_edges()}")
    lines.extend(f"e {index[u]} {index[v]}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


# -- bipartite matching -------------------------------------------------------

def max_bipartite_matching(left: Sequence[Hashable], right: Sequence[Hashable],
                           edges: Iterable[tuple[Hashable, Hashable]]) -> dict:
    """Maximum-cardinality matching as a ``{left: right}`` dict.

    Plain augmenting paths (Kuhn's algorithm), scanning vertices and their
    edges in input order so the result is deterministic.
    """
    right_set = set(right)
    nbrs: dict = {u: [] for u in left}
    for u, v in edges:
        if u not in nbrs or v not in right_set:
            raise ValueError(f"edge {(u, v)!r} does not respect the bipartition")
        if v not in nbrs[u]:
            nbrs[u].append(v)
    owner: dict = {}

    def augment(u, visited: set) -> bool:
        # Iterative DFS would only matter for very deep alternating paths.
        for v in nbrs[u]:
            if v in visited:
                continue
            visited.add(v)
            if v not in owner or augment(owner[v], visited):
                owner[v] = u
                return True
        return False

    for u in left:
        augment(u, set())
    return {u: v for v, u in owner.items()}


# -- integral maximum flow ----------------------------------------------------

@dataclass
class FlowNetwork:
    """Directed network with integer capacities on arcs ``(tail, head, cap)``."""

    num_nodes: int
    source: int
    sink: int
    arcs: list[tuple[int, int, int]] = field(default_factory=list)

    def add_arc(self, tail: int, head: int, capacity: int) -> int:
        if capacity < 0 or int(capacity) != capacity:
            raise ValueError("capacities must be non-negative integers")
        self.arcs.append((tail, head, int(capacity)))
        return len(self.arcs) - 1


def max_flow_integer(net: FlowNetwork) -> tuple[int, list[int]]:
    """Edmonds-Karp maximum flow; returns ``(value, flow_per_arc)``."""
    n = net.num_nodes
    # residual arcs: 2*i forward, 2*i+1 backward
    head: list[int] = []
    cap: list[int] = []
    out: list[list[int]] = [[] for _ in range(n)]
    for tail, hd, c in net.arcs:
        out[tail].append(len(head))
        head.append(hd)
        cap.append(c)
        out[hd].append(len(head))
        head.append(tail)
        cap.append(0)
    value = 0
    if net.source == net.sink:
        return 0, [0] * len(net.arcs)
    while True:
        pred = [-1] * n
        pred[net.source] = -2
        queue = deque([net.source])
        while queue and pred[net.sink] == -1:
            u = queue.popleft()
            for a in out[u]:
                if cap[a] > 0 and pred[head[a]] == -1:
                    pred[head[a]] = a
                    queue.append(head[a])
        if pred[net.sink] == -1:
            break
        push = None
        v = net.sink
        while v != net.source:
            a = pred[v]
            push = cap[a] if push is None else min(push, cap[a])
            v = head[a ^ 1]
        v = net.sink
        while v != net.source:
            a = pred[v]
            cap[a] -= push
            cap[a ^ 1] += push
            v = head[a ^ 1]
        value += push
    flow = [cap[2 * i + 1] for i in range(len(net.arcs))]
    return value, flow


def check_flow(net: FlowNetwork, flow: Sequence[int]) -> int:
    """Verify capacity and conservation; return the flow value."""
    balance = [0] * net.num_nodes
    for (tail, hd, c), f in zip(net.arcs, flow):
        if not (0 <= f <= c):
            raise AssertionError(f"arc {tail}->{hd} carries {f} outside [0, {c}]")
        balance[tail] -= f
        balance[hd] += f
    for v, b in enumerate(balance):
        if v not in (net.source, net.sink) and b != 0:
            raise AssertionError(f"conservation violated at node {v}")
    return balance[net.sink]


# -- K_{1,3} packing ------------------------------------------------------------

Claw = tuple[int, tuple[int, int, int]]


def claw_vertices(claw: Claw) -> tuple[int, ...]:
    return (claw[0],) + tuple(claw[1])


def _claws_within(graph: Graph, allowed: set[int], must_touch: set[int] | None = None):
    """Claws of ``graph`` using only ``allowed`` vertices, optionally touching a set."""
    out = []
    for c in sorted(allowed):
        leaves = sorted(graph.adj[c] & allowed)
        for trio in combinations(leaves, 3):
            if must_touch is None or c in must_touch or must_touch.intersection(trio):
                out.append((c, trio))
    return out


def _greedy_fill(graph: Graph, used: set[int], claws: list[Claw]) -> None:
    for v in graph.vertices:
        if v in used:
            continue
        free = [w for w in graph.neighbors(v) if w not in used]
        if len(free) >= 3:
            claw = (v, tuple(free[:3]))
            claws.append(claw)
            used.update(claw_vertices(claw))


def _find_exchange(graph: Graph, claws: list[Claw], used: set[int]):
    """A claw index and >= 2 disjoint claws that can replace it, or None."""
    for i, claw in enumerate(claws):
        freed = set(claw_vertices(claw))
        allowed = (set(graph.adj) - used) | freed
        candidates = _claws_within(graph, allowed, freed)
        for a, b in combinations(candidates, 2):
            if set(claw_vertices(a)).isdisjoint(claw_vertices(b)):
                return i, [a, b]
    return None


def k13_packing(graph: Graph) -> list[Claw]:
    """Vertex-disjoint claws ``(center, (leaf, leaf, leaf))``.

    Built greedily, then improved by local search until no single claw can
    be traded for two or more claws on its own vertices plus unused ones.
    """
    claws: list[Claw] = []
    used: set[int] = set()
    _greedy_fill(graph, used, claws)
    while True:
        swap = _find_exchange(graph, claws, used)
        if swap is None:
            break
        i, replacement = swap
        used.difference_update(claw_vertices(claws[i]))
        del claws[i]
        for claw in replacement:
            claws.append(claw)
            used.update(claw_vertices(claw))
        _greedy_fill(graph, used, claws)
    return sorted(claws)


def is_claw(graph: Graph, claw: Claw) -> bool:
    c, leaves = claw
    return len(set(leaves)) == 3 and c not in leaves and all(graph.has_edge(c, x) for x in leaves)
