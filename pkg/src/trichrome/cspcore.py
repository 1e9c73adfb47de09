"""Binary constraint satisfaction instances with small color domains.

A constraint ``((v, a), (w, b))`` forbids the combination v = a, w = b.
Every transformation here is solvability-exact and records back-map steps
on an optional *trail* (a plain list); replaying the trail backwards over a
solution of the transformed instance yields a solution of the original.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graphkit import Graph
from .workfactor import EPSILON, SizeMeasure

Pair = tuple[int, int]
Constraint = tuple[Pair, Pair]
Assignment = dict[int, int]

_EMPTY: frozenset = frozenset()


class BuildError(ValueError):
    pass


class ContractViolation(ValueError):
    pass


class RuleNotApplicable(ValueError):
    pass


class CspFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__((f"line {lineno}: " if lineno else "") + message)


def _canon(p: Pair, q: Pair) -> Constraint:
    return (p, q) if p < q else (q, p)


class CspInstance:
    """Variables with allowed-color sets plus forbidden (variable, color) pairs.

    ``domains`` maps variable -> set of colors; ``adj`` maps a (variable,
    color) pair to the set of pairs it is constrained against.  Pairs without
    constraints have no ``adj`` entry.
    """

    __slots__ = ("domains", "adj", "epsilon")

    def __init__(self, domains: dict[int, set[int]], adj: dict[Pair, set[Pair]],
                 epsilon: float = EPSILON):
        self.domains = domains
        self.adj = adj
        self.epsilon = epsilon

    # -- queries ---------------------------------------------------------------

    def copy(self) -> "CspInstance":
        return CspInstance({v: set(d) for v, d in self.domains.items()},
                           {p: set(n) for p, n in self.adj.items()}, self.epsilon)

    @property
    def variables(self) -> list[int]:
        return sorted(self.domains)

    def colors(self, v: int) -> list[int]:
        return sorted(self.domains[v])

    def pairs(self) -> list[Pair]:
        return [(v, c) for v in self.variables for c in self.colors(v)]

    def neighbors(self, p: Pair) -> set[Pair]:
        return self.adj.get(p, _EMPTY)

    def degree(self, p: Pair) -> int:
        return len(self.adj.get(p, _EMPTY))

    def neighbor_vars(self, p: Pair) -> set[int]:
        return {w for w, _ in self.adj.get(p, _EMPTY)}

    def constraints(self) -> list[Constraint]:
        return sorted({_canon(p, q) for p, nb in self.adj.items() for q in nb})

    def num_constraints(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def max_colors(self) -> int:
        return max((len(d) for d in self.domains.values()), default=0)

    def size(self) -> float:
        """n_3 + (2 - eps) n_4, with 2-color variables counted as 1 and 1-color as 0."""
        measure = SizeMeasure(self.epsilon)
        return sum(measure.weight(len(d)) for d in self.domains.values())

    def __len__(self) -> int:
        return len(self.domains)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CspInstance) and self.domains == other.domains
                and self.constraints() == other.constraints())

    def __repr__(self) -> str:
        return f"CspInstance(n={len(self)}, m={self.num_constraints()}, size={self.size():.4f})"

    # -- in-place primitives (callers own the instance) -----------------------

    def _add_constraint(self, p: Pair, q: Pair) -> None:
        self.adj.setdefault(p, set()).add(q)
        self.adj.setdefault(q, set()).add(p)

    def _drop_pair(self, p: Pair) -> None:
        """Remove color p[1] from variable p[0] together with its constraints."""
        for q in self.adj.pop(p, _EMPTY):
            nb = self.adj[q]
            nb.discard(p)
            if not nb:
                del self.adj[q]
        self.domains[p[0]].discard(p[1])

    def _drop_var(self, v: int) -> None:
        for c in list(self.domains[v]):
            self._drop_pair((v, c))
        del self.domains[v]


# -- back-map steps -------------------------------------------------------------

@dataclass(frozen=True)
class Fix:
    var: int
    color: int

    def apply(self, a: Assignment) -> None:
        a[self.var] = self.color


@dataclass(frozen=True)
class Eliminate:
    """A two-color variable removed by resolving its two colors against each other."""

    var: int
    first: int
    second: int
    first_neighbors: frozenset

    def apply(self, a: Assignment) -> None:
        blocked = any(a.get(w) == b for w, b in self.first_neighbors)
        a[self.var] = self.second if blocked else self.first


@dataclass(frozen=True)
class Merge:
    """Two three-color variables joined into one four-color variable."""

    merged: int
    v: int
    w: int
    v_isolated: int
    w_isolated: int
    origin: tuple  # ((merged color, side var, side color), ...)

    def apply(self, a: Assignment) -> None:
        x = a.pop(self.merged)
        for color, var, orig in self.origin:
            if color == x:
                if var == self.v:
                    a[self.v], a[self.w] = orig, self.w_isolated
                else:
                    a[self.v], a[self.w] = self.v_isolated, orig
                return
        raise ContractViolation(f"merged variable {self.merged} took unknown color {x}")


@dataclass(frozen=True)
class Split:
    """A four-color variable expanded into two constrained three-color variables."""

    var: int
    v: int
    w: int
    v_special: int
    w_special: int

    def apply(self, a: Assignment) -> None:
        cv, cw = a.pop(self.v), a.pop(self.w)
        a[self.var] = cw if cv == self.v_special else cv


def extend_assignment(trail: Sequence, assignment: Mapping[int, int]) -> Assignment:
    """Replay back-map steps in reverse over a solution of the final instance."""
    a = dict(assignment)
    for step in reversed(trail):
        step.apply(a)
    return a


# -- construction and checking -------------------------------------------------

def build_instance(domains: Mapping[int, Iterable[int]], constraints: Iterable = (),
                   epsilon: float = EPSILON) -> CspInstance:
    """Normalized instance from ``{var: colors}`` and ``((v, a), (w, b))`` pairs."""
    doms: dict[int, set[int]] = {}
    for v, colors in domains.items():
        colors = list(colors)
        if len(set(colors)) != len(colors):
            raise BuildError(f"variable {v} lists a color twice")
        doms[v] = set(colors)
    inst = CspInstance(dict(sorted(doms.items())), {}, epsilon)
    for p, q in constraints:
        p, q = tuple(p), tuple(q)
        for var, color in (p, q):
            if var not in doms:
                raise BuildError(f"constraint mentions undeclared variable {var}")
            if color not in doms[var]:
                raise BuildError(f"constraint mentions color {color} not allowed at {var}")
        if p[0] == q[0]:
            raise BuildError(f"constraint {p}-{q} does not join two distinct variables")
        inst._add_constraint(p, q)
    return inst


def is_solution(inst: CspInstance, assignment: Mapping[int, int]) -> bool:
    for v, dom in inst.domains.items():
        if v not in assignment:
            raise ContractViolation(f"assignment misses variable {v}")
        if assignment[v] not in dom:
            return False
    for (v, a), nb in inst.adj.items():
        if assignment[v] == a and any(assignment[w] == b for w, b in nb):
            return False
    return True


# -- safe local transformations -------------------------------------------------

def _fix(inst: CspInstance, v: int, c: int, trail: list) -> None:
    for q in list(inst.neighbors((v, c))):
        inst._drop_pair(q)
    inst._drop_var(v)
    trail.append(Fix(v, c))


def propagate(inst: CspInstance, trail: list) -> bool:
    """Fix single-color variables until none remain; False on an empty domain."""
    while True:
        small = [v for v, d in inst.domains.items() if len(d) <= 1]
        if not small:
            return True
        for v in sorted(small):
            dom = inst.domains.get(v)
            if dom is None:
                continue
            if not dom:
                return False
            if len(dom) == 1:
                _fix(inst, v, next(iter(dom)), trail)


def assign_and_propagate(inst: CspInstance, v: int, c: int,
                         trail: list | None = None) -> CspInstance | None:
    """Fix v = c, delete every color conflicting with it, and cascade.

    Returns the reduced instance, or None when some domain empties.
    """
    if c not in inst.domains.get(v, ()):
        raise ContractViolation(f"color {c} is not allowed at variable {v}")
    work = inst.copy()
    steps: list = []
    _fix(work, v, c, steps)
    ok = propagate(work, steps)
    if trail is not None:
        trail.extend(steps)
    return work if ok else None


def delete_color(inst: CspInstance, v: int, c: int,
                 trail: list | None = None) -> CspInstance | None:
    """Forbid v = c.  A variable left with one color is fixed; none left is UNSAT (None)."""
    if c not in inst.domains.get(v, ()):
        raise ContractViolation(f"color {c} is not allowed at variable {v}")
    work = inst.copy()
    steps: list = []
    work._drop_pair((v, c))
    ok = propagate(work, steps)
    if trail is not None:
        trail.extend(steps)
    return work if ok else None


def _eliminate(inst: CspInstance, v: int, trail: list) -> None:
    a, b = sorted(inst.domains[v])
    na, nb = set(inst.neighbors((v, a))), set(inst.neighbors((v, b)))
    inst._drop_var(v)
    trail.append(Eliminate(v, a, b, frozenset(na)))
    doomed = na & nb
    for q in sorted(doomed):
        inst._drop_pair(q)
    for q1 in sorted(na - doomed):
        for q2 in sorted(nb - doomed):
            if q1[0] != q2[0]:
                inst._add_constraint(q1, q2)


def eliminate_two_color(inst: CspInstance, v: int,
                        trail: list | None = None) -> CspInstance | None:
    """Remove a two-color variable by resolution.

    With colors a, b at v, v can be colored unless some neighbor of (v, a)
    and some neighbor of (v, b) are both chosen, so every such pair becomes
    a new constraint.  A pair constrained against both colors is deleted.
    """
    if len(inst.domains.get(v, ())) != 2:
        raise RuleNotApplicable(f"variable {v} does not have exactly two colors")
    work = inst.copy()
    steps: list = []
    _eliminate(work, v, steps)
    ok = propagate(work, steps)
    if trail is not None:
        trail.extend(steps)
    return work if ok else None


def _fresh_var(inst: CspInstance) -> int:
    return max(inst.domains, default=0) + 1


def isolated_constraint(inst: CspInstance, v: int, w: int) -> tuple[int, int] | None:
    """Colors (R, R') with {(v,R),(w,R')} the only constraint on either pair."""
    for r in inst.colors(v):
        nb = inst.neighbors((v, r))
        if len(nb) == 1:
            (q,) = nb
            if q[0] == w and inst.degree(q) == 1:
                return r, q[1]
    return None


def merge_isolated_pair(inst: CspInstance, v: int, w: int,
                        trail: list | None = None) -> CspInstance:
    """Replace two three-color variables joined by an isolated constraint by one four-color variable."""
    if v == w or len(inst.domains.get(v, ())) != 3 or len(inst.domains.get(w, ())) != 3:
        raise RuleNotApplicable("merge needs two distinct three-color variables")
    found = isolated_constraint(inst, v, w)
    if found is None:
        raise RuleNotApplicable(f"no isolated constraint between {v} and {w}")
    r, r2 = found
    work = inst.copy()
    u = _fresh_var(work)
    origin = []
    sides = [(v, c) for c in work.colors(v) if c != r] + [(w, c) for c in work.colors(w) if c != r2]
    external = {}
    for color, p in enumerate(sides, 1):
        origin.append((color, p[0], p[1]))
        external[color] = [q for q in work.neighbors(p) if q[0] not in (v, w)]
    work._drop_var(v)
    work._drop_var(w)
    work.domains[u] = set(external)
    for color, nb in external.items():
        for q in nb:
            work._add_constraint((u, color), q)
    if trail is not None:
        trail.append(Merge(u, v, w, r, r2, tuple(origin)))
    return work


def split_four_color(inst: CspInstance, u: int, trail: list | None = None) -> CspInstance:
    """Expand a four-color variable into two three-color variables (inverse of merging).

    The two lowest colors go to the first new variable, the others to the
    second; each gets one extra color, and those two extras are constrained
    against each other.
    """
    if len(inst.domains.get(u, ())) != 4:
        raise RuleNotApplicable(f"variable {u} does not have four colors")
    work = inst.copy()
    cols = work.colors(u)
    external = {c: sorted(work.neighbors((u, c))) for c in cols}
    work._drop_var(u)
    v = _fresh_var(work)
    w = v + 1
    v_special = max(cols[:2]) + 1
    w_special = max(cols[2:]) + 1
    work.domains[v] = {cols[0], cols[1], v_special}
    work.domains[w] = {cols[2], cols[3], w_special}
    for side, cs in ((v, cols[:2]), (w, cols[2:])):
        for c in cs:
            for q in external[c]:
                work._add_constraint((side, c), q)
    work._add_constraint((v, v_special), (w, w_special))
    if trail is not None:
        trail.append(Split(u, v, w, v_special, w_special))
    return work


# -- exact solvers ----------------------------------------------------------------

def brute_force_solve(inst: CspInstance, count: bool = False):
    """Exhaustive search in lexicographic order of (variable, color).

    Returns the first solution (or None), or the number of solutions when
    ``count`` is set.  Partial assignments are checked as they grow, which
    visits the same solutions in the same order as a full product scan.
    """
    order = inst.variables
    doms = [inst.colors(v) for v in order]
    chosen: dict[int, int] = {}
    total = 0

    def ok(v: int, c: int) -> bool:
        return not any(chosen.get(w) == b for w, b in inst.neighbors((v, c)))

    def rec(i: int):
        nonlocal total
        if i == len(order):
            if count:
                total += 1
                return None
            return dict(chosen)
        v = order[i]
        for c in doms[i]:
            if ok(v, c):
                chosen[v] = c
                found = rec(i + 1)
                del chosen[v]
                if found is not None:
                    return found
        return None

    result = rec(0)
    return total if count else result


def _tarjan(num: int, succ: Sequence[Sequence[int]]) -> list[int]:
    """SCC index per node; indices are issued in reverse topological order."""
    index = [-1] * num
    low = [0] * num
    comp = [-1] * num
    on_stack = [False] * num
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(num):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            node, i = work[-1]
            if i < len(succ[node]):
                work[-1] = (node, i + 1)
                nxt = succ[node][i]
                if index[nxt] == -1:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack[nxt] = True
                    work.append((nxt, 0))
                elif on_stack[nxt]:
                    low[node] = min(low[node], index[nxt])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    x = stack.pop()
                    on_stack[x] = False
                    comp[x] = ncomp
                    if x == node:
                        break
                ncomp += 1
    return comp


def solve_22csp(inst: CspInstance) -> Assignment | None:
    """Polynomial solver for instances whose variables all have at most two colors.

    Single-color variables are propagated first; the rest becomes 2-SAT over
    "v takes its first color" literals, decided with strongly connected
    components of the implication graph.
    """
    if inst.max_colors() > 2:
        raise ContractViolation("solve_22csp needs every domain to have at most two colors")
    work = inst.copy()
    trail: list = []
    if not propagate(work, trail):
        return None
    order = work.variables
    idx = {v: i for i, v in enumerate(order)}
    cols = {v: work.colors(v) for v in order}
    # node 2i: v = cols[v][0]; node 2i + 1: v = cols[v][1]
    def node(p: Pair) -> int:
        return 2 * idx[p[0]] + cols[p[0]].index(p[1])

    succ: list[list[int]] = [[] for _ in range(2 * len(order))]
    for p, q in work.constraints():
        a, b = node(p), node(q)
        succ[a].append(b ^ 1)
        succ[b].append(a ^ 1)
    comp = _tarjan(len(succ), succ)
    solution: Assignment = {}
    for v in order:
        i = idx[v]
        if comp[2 * i] == comp[2 * i + 1]:
            return None
        solution[v] = cols[v][0] if comp[2 * i] < comp[2 * i + 1] else cols[v][1]
    return extend_assignment(trail, solution)


# -- translations ------------------------------------------------------------------

def from_graph_coloring(graph: Graph, lists: Mapping[int, Iterable[int]] | None = None,
                        epsilon: float = EPSILON) -> CspInstance:
    """(3,2)-CSP for (list) 3-coloring: one variable per vertex, one constraint per shared color per edge."""
    doms = {}
    for v in graph.vertices:
        colors = sorted(lists[v]) if lists is not None else [1, 2, 3]
        if len(colors) > 3:
            raise ContractViolation(f"vertex {v} has a list of {len(colors)} colors")
        doms[v] = colors
    constraints = []
    for u, v in graph.edges():
        for c in sorted(set(doms[u]) & set(doms[v])):
            constraints.append(((u, c), (v, c)))
    return build_instance(doms, constraints, epsilon)


# -- text format -------------------------------------------------------------------

def format_csp(inst: CspInstance) -> str:
    """``p csp n`` / ``v id k colors`` / ``c v cv w cw`` text; variables renumbered 1..n."""
    index = {v: i + 1 for i, v in enumerate(inst.variables)}
    lines = [f"p csp {len(inst)}"]
    for v in inst.variables:
        cols = inst.colors(v)
        lines.append(" ".join(["v", str(index[v]), str(len(cols))] + [str(c) for c in cols]))
    for (v, a), (w, b) in inst.constraints():
        lines.append(f"c {index[v]} {a} {index[w]} {b}")
    return "\n".join(lines) + "\n"


def parse_csp(text: str, epsilon: float = EPSILON) -> CspInstance:
    nvars = None
    domains: dict[int, list[int]] = {}
    constraints = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag = tokens[0]
        try:
            nums = [int(t) for t in tokens[2:]] if tag == "p" else [int(t) for t in tokens[1:]]
        except ValueError:
            raise CspFormatError(f"expected integers in {line!r}", lineno) from None
        if tag == "p":
            if nvars is not None:
                raise CspFormatError("duplicate problem line", lineno)
            if len(tokens) != 3 or tokens[1] != "csp" or len(nums) != 1 or nums[0] < 0:
                raise CspFormatError("expected 'p csp <nvars>'", lineno)
            nvars = nums[0]
        elif nvars is None:
            raise CspFormatError("data before problem line", lineno)
        elif tag == "v":
            if len(nums) < 2 or len(nums) != 2 + nums[1] or nums[1] < 0:
                raise CspFormatError("expected 'v <id> <k> <c1> ... <ck>'", lineno)
            var = nums[0]
            if not 1 <= var <= nvars:
                raise CspFormatError(f"variable {var} out of range 1..{nvars}", lineno)
            if var in domains:
                raise CspFormatError(f"variable {var} declared twice", lineno)
            if len(set(nums[2:])) != nums[1]:
                raise CspFormatError(f"variable {var} lists a color twice", lineno)
            domains[var] = nums[2:]
        elif tag == "c":
            if len(nums) != 4:
                raise CspFormatError("expected 'c <v> <cv> <w> <cw>'", lineno)
            v, a, w, b = nums
            for var, col in ((v, a), (w, b)):
                if var not in domains or col not in domains[var]:
                    raise CspFormatError(f"constraint mentions undeclared ({var}, {col})", lineno)
            if v == w:
                raise CspFormatError("constraint within a single variable", lineno)
            constraints.append(((v, a), (w, b)))
        else:
            raise CspFormatError(f"unknown line tag {tag!r}", lineno)
    if nvars is None:
        raise CspFormatError("missing problem line")
    missing = [v for v in range(1, nvars + 1) if v not in domains]
    if missing:
        raise CspFormatError(f"variables without a 'v' line: {missing[:5]}")
    return build_instance(domains, constraints, epsilon)
