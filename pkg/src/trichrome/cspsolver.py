"""Branch-and-reduce search for (3,2)- and (4,2)-CSP.

Each search node is first tidied up (housekeeping), then matched against
a prioritized catalog of reduction rules R1..R9.  When no rule applies,
every constraint sits inside a four-pair clique (a good three-component)
or a triangle (a triangular two-component) and the instance is decided by
bipartite matching between variables and components.

Branches are built from "use (v, c)" / "forbid (v, c)" decisions.  A rule's
decision lists always cover every solution, so the parent is solvable iff
some child is; rule R1 instead merges two variables (see
:func:`cspcore.merge_isolated_pair`).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import cspcore
from .cspcore import (Assignment, ContractViolation, CspInstance, Pair, _eliminate, _fix,
                      extend_assignment, is_solution, merge_isolated_pair, propagate)
from .graphkit import max_bipartite_matching
from .workfactor import work_factor

RULES = ("R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9")


def claimed_decrements(rule: str, eps: float) -> tuple[float, ...]:
    """Size decrements the analysis attributes to each rule."""
    return {
        "R1": (eps,),
        "R2": (2 - eps, 3 - eps),
        "R3": (2 - eps, 3 - 2 * eps),
        "R4": (1 - eps, 5 - 4 * eps),
        "R5": (3 - eps, 4 - eps, 4 - eps),
        "R6": (1 + eps, 4),
        "R7": (4, 4, 4),
        "R8": (4, 4, 5, 5),
        "R9": (3, 3, 5),
    }[rule]


def claimed_work_factor(rule: str, eps: float) -> float:
    if rule == "R6":
        return max(work_factor([1 + eps, 4]), work_factor([3, 4 - eps, 4]))
    return work_factor(claimed_decrements(rule, eps))


# -- telemetry --------------------------------------------------------------------

@dataclass
class RuleTally:
    triggers: int = 0
    min_decrement: float = float("inf")
    worst_factor: float = 1.0
    shortfalls: int = 0


@dataclass
class SearchStats:
    calls: int = 0
    base_cases: int = 0
    root_size: float = 0.0
    elapsed: float = 0.0
    rules: dict = field(default_factory=lambda: {r: RuleTally() for r in RULES})

    @property
    def rule_counts(self) -> dict[str, int]:
        return {r: t.triggers for r, t in self.rules.items()}

    def effective_work_factor(self) -> float:
        if self.calls < 1 or self.root_size <= 0:
            return 1.0
        return self.calls ** (1.0 / self.root_size)

    def record(self, step: "ReductionStep", eps: float) -> None:
        tally = self.rules[step.rule]
        tally.triggers += 1
        live = [b.decrement for b in step.branches if b.child is not None]
        tally.min_decrement = min([tally.min_decrement] + [b.decrement for b in step.branches])
        achieved = work_factor(live) if live else 1.0
        tally.worst_factor = max(tally.worst_factor, achieved)
        if achieved > claimed_work_factor(step.rule, eps) + 1e-9:
            tally.shortfalls += 1

    def merge(self, other: "SearchStats") -> "SearchStats":
        self.calls += other.calls
        self.base_cases += other.base_cases
        for r, t in other.rules.items():
            mine = self.rules[r]
            mine.triggers += t.triggers
            mine.min_decrement = min(mine.min_decrement, t.min_decrement)
            mine.worst_factor = max(mine.worst_factor, t.worst_factor)
            mine.shortfalls += t.shortfalls
        return self

    def as_dict(self) -> dict:
        out = {
            "calls": self.calls,
            "base_cases": self.base_cases,
            "root_size": round(self.root_size, 6),
            "effective_work_factor": round(self.effective_work_factor(), 6),
            "elapsed_s": round(self.elapsed, 6),
        }
        for r, t in self.rules.items():
            out[f"rule.{r}.triggers"] = t.triggers
            if t.triggers:
                out[f"rule.{r}.min_decrement"] = round(t.min_decrement, 6)
                out[f"rule.{r}.worst_factor"] = round(t.worst_factor, 6)
                out[f"rule.{r}.shortfalls"] = t.shortfalls
        return out


# -- housekeeping -------------------------------------------------------------------

def housekeep(inst: CspInstance, trail: list) -> bool:
    """Simplify ``inst`` in place; False if it is found unsolvable.

    Fixes single-color variables, resolves two-color variables away, and
    gives a variable any color that has no constraints (such a color
    conflicts with nothing, so using it loses no solutions).
    """
    while True:
        if not propagate(inst, trail):
            return False
        two = [v for v, d in inst.domains.items() if len(d) == 2]
        if two:
            _eliminate(inst, min(two), trail)
            continue
        free = next(((v, c) for v in inst.variables for c in inst.colors(v)
                     if inst.degree((v, c)) == 0), None)
        if free is None:
            return True
        _fix(inst, *free, trail)


def prepare(inst: CspInstance) -> tuple[CspInstance | None, list]:
    """Housekept copy of ``inst`` plus its back-map trail (None when unsolvable)."""
    work = inst.copy()
    trail: list = []
    return (work if housekeep(work, trail) else None), trail


# -- reduction steps ---------------------------------------------------------------

@dataclass
class Branch:
    child: CspInstance | None  # None: refuted while housekeeping
    decrement: float
    trail: list


@dataclass
class ReductionStep:
    rule: str
    pivot: Pair
    branches: list[Branch]

    def back_map(self, index: int, child_solution: Assignment) -> Assignment:
        return extend_assignment(self.branches[index].trail, child_solution)


USE, FORBID = "use", "forbid"


def _branch(parent: CspInstance, decisions) -> Branch:
    work = parent.copy()
    for kind, (v, c) in decisions:
        if kind == USE:
            for other in [x for x in work.domains[v] if x != c]:
                work._drop_pair((v, other))
            if c not in work.domains[v]:
                work.domains[v].clear()
        elif c in work.domains[v]:
            work._drop_pair((v, c))
    trail: list = []
    ok = housekeep(work, trail)
    before = parent.size()
    return Branch(work if ok else None, before - (work.size() if ok else 0.0), trail)


def _step(rule: str, parent: CspInstance, pivot: Pair, decision_lists) -> ReductionStep:
    return ReductionStep(rule, pivot, [_branch(parent, d) for d in decision_lists])


# Candidate pivots tried per node; the one with the smallest achieved
# branching factor is used.
PIVOT_CANDIDATES = 24


def _achieved_factor(step: ReductionStep) -> float:
    live = [b.decrement for b in step.branches if b.child is not None]
    return work_factor(live) if live else 1.0


# Branch counts each rule is allowed to use.
BRANCH_COUNTS = {"R2": (2,), "R3": (2,), "R4": (2,), "R5": (3,), "R6": (2, 3),
                 "R7": (3,), "R8": (4,), "R9": (3,)}


def _best_step(rule: str, parent: CspInstance, candidates) -> ReductionStep | None:
    best, best_factor = None, float("inf")
    allowed = [(pivot, lists) for pivot, lists in candidates if len(lists) in BRANCH_COUNTS[rule]]
    for pivot, lists in allowed[:PIVOT_CANDIDATES]:
        step = _step(rule, parent, pivot, lists)
        factor = _achieved_factor(step)
        if factor < best_factor - 1e-12:
            best, best_factor = step, factor
    return best


def _use_or_forbid(p):
    return p, [[(USE, p)], [(FORBID, p)]]


def _neighbor_cover(inst: CspInstance, p: Pair):
    """Branch on which neighbor of p is used, if any; with none used, p itself is free."""
    nb = sorted(inst.neighbors(p))
    lists = [[(USE, q)] + [(FORBID, r) for r in nb[:i]] for i, q in enumerate(nb)]
    return p, lists + [[(FORBID, r) for r in nb]]


def _r1(inst: CspInstance):
    for p in inst.pairs():
        if inst.degree(p) != 1:
            continue
        (q,) = inst.neighbors(p)
        v, w = p[0], q[0]
        if inst.degree(q) == 1 and len(inst.domains[v]) == 3 and len(inst.domains[w]) == 3:
            trail: list = []
            child = merge_isolated_pair(inst, v, w, trail)
            ok = housekeep(child, trail)
            dec = inst.size() - (child.size() if ok else 0.0)
            return ReductionStep("R1", p, [Branch(child if ok else None, dec, trail)])
    return None


def _r2(inst: CspInstance):
    for p in inst.pairs():
        if inst.degree(p) == 1:
            (q,) = inst.neighbors(p)
            # If neither is used, switching v to p stays valid, so these two cover everything.
            yield p, [[(USE, p)], [(USE, q)]]


def _r3(inst: CspInstance):
    for p in inst.pairs():
        if len(inst.neighbor_vars(p)) < inst.degree(p):
            yield _use_or_forbid(p)


def _r4(inst: CspInstance):
    for p in inst.pairs():
        k = len(inst.neighbor_vars(p))
        if k >= 4 or (k == 3 and len(inst.domains[p[0]]) == 4):
            yield _use_or_forbid(p)


def _r5(inst: CspInstance):
    for p in inst.pairs():
        if inst.degree(p) != 3:
            continue
        wide = sorted(q for q in inst.neighbors(p) if len(inst.domains[q[0]]) == 4)
        for q in wide:
            yield p, [[(USE, p)], [(USE, q)], [(FORBID, p), (FORBID, q)]]


def _r6(inst: CspInstance):
    for p in inst.pairs():
        if inst.degree(p) != 3:
            continue
        light = sorted(q for q in inst.neighbors(p) if inst.degree(q) == 2)
        if light:
            yield _use_or_forbid(p)
            for q in light:
                yield p, [[(USE, p)], [(USE, q)], [(FORBID, p), (FORBID, q)]]


@dataclass(frozen=True)
class Component:
    pairs: tuple[Pair, ...]
    kind: str  # small-good, small-not-good, large, triangle, non-triangle

    @property
    def variables(self) -> set[int]:
        return {v for v, _ in self.pairs}


@dataclass
class ComponentView:
    three: list[Component]
    two: list[Component]

    def component_of(self) -> dict[Pair, int]:
        out = {}
        for i, comp in enumerate(self.three + self.two):
            for p in comp.pairs:
                out[p] = i
        return out


def classify_components(inst: CspInstance) -> ComponentView:
    """Connected components of 3-constraint pairs and of 2-constraint pairs."""
    pairs = [p for p in inst.pairs() if inst.degree(p) > 0]
    for p in pairs:
        if inst.degree(p) not in (2, 3):
            raise ContractViolation(f"pair {p} has {inst.degree(p)} constraints")
    view = ComponentView([], [])
    seen: set[Pair] = set()
    for p in pairs:
        if p in seen:
            continue
        deg = inst.degree(p)
        comp = [p]
        seen.add(p)
        frontier = [p]
        while frontier:
            x = frontier.pop()
            for y in inst.neighbors(x):
                if y not in seen and inst.degree(y) == deg:
                    seen.add(y)
                    comp.append(y)
                    frontier.append(y)
        comp.sort()
        nvars = len({v for v, _ in comp})
        if deg == 3:
            if nvars == 4:
                kind = "small-good" if len(comp) == 4 else "small-not-good"
            else:
                kind = "large"
            view.three.append(Component(tuple(comp), kind))
        else:
            triangle = len(comp) == 3 and all(
                b in inst.neighbors(a) for i, a in enumerate(comp) for b in comp[i + 1:])
            view.two.append(Component(tuple(comp), "triangle" if triangle else "non-triangle"))
    return view


def _component_candidates(inst: CspInstance, rule: str, comps):
    for comp in comps:
        for p in comp.pairs:
            nb = sorted(inst.neighbors(p))
            if rule == "R8":
                for i, q1 in enumerate(nb):
                    for q2 in nb[i + 1:]:
                        yield p, [[(USE, p)], [(USE, q1)], [(USE, q2), (FORBID, p), (FORBID, q1)],
                                  [(FORBID, p), (FORBID, q1), (FORBID, q2)]]
            else:
                for q in nb:
                    yield p, [[(USE, p)], [(USE, q)], [(FORBID, p), (FORBID, q)]]
            if rule != "R7":
                yield _neighbor_cover(inst, p)


def find_reduction(inst: CspInstance) -> ReductionStep | None:
    """First applicable rule in priority order, or None when the matching base case applies.

    ``inst`` must be housekept (no variables with fewer than three colors,
    no unconstrained colors).  Within the rule, the pivot with the smallest
    achieved branching factor among the first PIVOT_CANDIDATES is used.
    """
    step = _r1(inst)
    if step is not None:
        return step
    for rule, gen in (("R2", _r2), ("R3", _r3), ("R4", _r4), ("R5", _r5), ("R6", _r6)):
        step = _best_step(rule, inst, gen(inst))
        if step is not None:
            return step
    view = classify_components(inst)
    for rule, group, kind in (("R7", view.three, "small-not-good"), ("R8", view.three, "large"),
                              ("R9", view.two, "non-triangle")):
        comps = [c for c in group if c.kind == kind]
        if comps:
            return _best_step(rule, inst, _component_candidates(inst, rule, comps))
    return None


# -- matching base case ---------------------------------------------------------

def base_case_applies(inst: CspInstance) -> bool:
    """Every color is constrained and every constraint lies in a K4 or triangle component."""
    try:
        view = classify_components(inst)
    except ContractViolation:
        return False
    if any(inst.degree(p) == 0 for p in inst.pairs()):
        return False
    if any(c.kind != "small-good" for c in view.three) or any(c.kind != "triangle" for c in view.two):
        return False
    where = view.component_of()
    return all(where[p] == where[q] for p, q in inst.constraints())


def matching_base_case(inst: CspInstance) -> Assignment | None:
    """Decide an instance made of K4 and triangle components by bipartite matching.

    Each component's pairs are pairwise constrained, so a solution uses at
    most one pair per component; all constraints are inside components, so
    any choice of one pair per variable from distinct components is valid.
    """
    if not base_case_applies(inst):
        raise ContractViolation("instance is not in matching base-case form")
    view = classify_components(inst)
    comps = view.three + view.two
    where = view.component_of()
    edges = []
    owner: dict[tuple[int, int], Pair] = {}
    for p in inst.pairs():
        key = (p[0], where[p])
        if key not in owner:
            owner[key] = p
            edges.append(key)
    matching = max_bipartite_matching(inst.variables, list(range(len(comps))), edges)
    if len(matching) < len(inst):
        return None
    return {v: owner[(v, ci)][1] for v, ci in matching.items()}


# -- search ---------------------------------------------------------------------

BaseHook = Callable[[CspInstance, "Assignment | None"], None]


def _search(inst: CspInstance, stats: SearchStats, hook: BaseHook | None) -> Assignment | None:
    stats.calls += 1
    if not inst.domains:
        return {}
    step = find_reduction(inst)
    if step is None:
        stats.base_cases += 1
        result = matching_base_case(inst)
        if hook is not None:
            hook(inst, result)
        return result
    stats.record(step, inst.epsilon)
    for i, branch in enumerate(step.branches):
        if branch.child is None:
            continue
        found = _search(branch.child, stats, hook)
        if found is not None:
            return step.back_map(i, found)
    return None


def _search_branch(child: CspInstance) -> tuple[Assignment | None, SearchStats]:
    stats = SearchStats()
    return _search(child, stats, None), stats


def solve(inst: CspInstance, *, on_base_case: BaseHook | None = None,
          parallel: bool = False, workers: int | None = None
          ) -> tuple[Assignment | None, SearchStats]:
    """Depth-first branch and reduce.  Returns ``(solution or None, stats)``.

    With ``parallel`` the root's branches run in worker processes; the
    lowest-indexed successful branch wins, so the answer matches the
    sequential one but per-rule statistics cover every explored branch.
    """
    if inst.max_colors() > 4:
        raise ContractViolation("solve handles at most four colors per variable")
    start = time.perf_counter()
    stats = SearchStats(root_size=inst.size())
    work, trail = prepare(inst)
    result = None
    if work is not None:
        if parallel and on_base_case is None:
            result = _solve_parallel(work, stats, workers)
        else:
            result = _search(work, stats, on_base_case)
    solution = None
    if result is not None:
        solution = extend_assignment(trail, result)
        if not is_solution(inst, solution):
            raise AssertionError("back-mapped assignment violates the instance")
    stats.elapsed = time.perf_counter() - start
    return solution, stats


def _solve_parallel(work: CspInstance, stats: SearchStats, workers: int | None):
    stats.calls += 1
    if not work.domains:
        return {}
    step = find_reduction(work)
    if step is None:
        stats.base_cases += 1
        return matching_base_case(work)
    stats.record(step, work.epsilon)
    live = [(i, b.child) for i, b in enumerate(step.branches) if b.child is not None]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(_search_branch, [c for _, c in live]))
    found = None
    for (i, _), (res, sub) in zip(live, outcomes):
        stats.merge(sub)
        if res is not None and found is None:
            found = step.back_map(i, res)
    return found


def is_satisfiable(inst: CspInstance) -> bool:
    return solve(inst)[0] is not None


__all__ = [
    "RULES", "Branch", "Component", "ComponentView", "ReductionStep", "SearchStats",
    "base_case_applies", "classify_components", "claimed_decrements", "claimed_work_factor",
    "find_reduction", "housekeep", "matching_base_case", "prepare", "solve", "cspcore",
]
