"""3-SAT through clause-selection CSP.

Every 3-clause becomes a CSP variable whose colors say which of its
literals is designated true.  Two designations conflict when they are
jointly inconsistent with the 1- and 2-clauses, which is a 2-SAT question.
Pairwise consistency suffices: 2-CNF solution sets are closed under the
bitwise majority, so literals that are consistent pairwise with a 2-CNF
are consistent all together.  The CSP therefore has exactly t variables,
however many variables and 2-clauses the formula has.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from . import cspsolver
from .cspcore import CspInstance, build_instance, solve_22csp

Literal = int


class CnfFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__((f"line {lineno}: " if lineno else "") + message)


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        for clause in self.clauses:
            if len(clause) > 3:
                raise ValueError("clauses longer than three literals are not supported")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")

    @property
    def t(self) -> int:
        """Number of 3-clauses."""
        return sum(1 for c in self.clauses if len(c) == 3)

    def has_empty_clause(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def short_clauses(self) -> list[tuple[int, ...]]:
        return [c for c in self.clauses if len(c) <= 2]

    def three_clauses(self) -> list[tuple[int, ...]]:
        return [c for c in self.clauses if len(c) == 3]

    def satisfied_by(self, model: dict[int, bool]) -> bool:
        return all(any(model[abs(l)] == (l > 0) for l in c) for c in self.clauses)


def _two_cnf_csp(num_vars: int, clauses: Iterable[Sequence[int]],
                 units: Iterable[int] = ()) -> CspInstance:
    """(2,2)-CSP over colors 0 (false) / 1 (true); contradicted units empty a domain."""
    doms = {v: {0, 1} for v in range(1, num_vars + 1)}
    cons = []
    for clause in list(clauses) + [(u,) for u in units]:
        lits = set(clause)
        if any(-l in lits for l in lits):
            continue
        if len(lits) == 1:
            (l,) = lits
            doms[abs(l)].discard(0 if l > 0 else 1)
        else:
            l1, l2 = sorted(lits)
            cons.append(((abs(l1), 0 if l1 > 0 else 1), (abs(l2), 0 if l2 > 0 else 1)))
    cons = [c for c in cons if all(col in doms[v] for v, col in c)]
    return build_instance({v: sorted(d) for v, d in doms.items()}, cons)


class TwoCnf:
    """Conflict oracle for literals against a fixed 1-/2-clause formula."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]]):
        self.num_vars = num_vars
        self.clauses = [tuple(c) for c in clauses]
        if any(len(c) > 2 for c in self.clauses):
            raise ValueError("TwoCnf takes only 1- and 2-clauses")
        self._conflict = lru_cache(maxsize=None)(self._decide)

    def solve(self, units: Iterable[int] = ()) -> dict[int, bool] | None:
        inst = _two_cnf_csp(self.num_vars, self.clauses, units)
        sol = solve_22csp(inst)
        if sol is None:
            return None
        return {v: bool(sol[v]) for v in range(1, self.num_vars + 1)}

    def _decide(self, l1: int, l2: int) -> bool:
        return self.solve((l1, l2)) is None

    def conflict(self, l1: int, l2: int) -> bool:
        return self._conflict(*sorted((l1, l2)))


def literal_conflict(f2: CnfFormula | TwoCnf, l1: int, l2: int) -> bool:
    """True iff the 1-/2-clause formula together with l1 and l2 is unsatisfiable."""
    if isinstance(f2, CnfFormula):
        f2 = TwoCnf(f2.num_vars, f2.clauses)
    return f2.conflict(l1, l2)


def translate_3sat(formula: CnfFormula, oracle: TwoCnf | None = None) -> CspInstance:
    """One CSP variable per 3-clause (in clause order, numbered from 1).

    Color i+1 designates the clause's i-th literal as true.  Literals that
    contradict the short clauses on their own are dropped, and two
    designations on different clauses are constrained when they conflict.
    """
    if formula.has_empty_clause():
        raise ValueError("formula contains an empty clause")
    oracle = oracle or TwoCnf(formula.num_vars, formula.short_clauses())
    threes = formula.three_clauses()
    doms = {}
    for k, clause in enumerate(threes, 1):
        doms[k] = [i + 1 for i, lit in enumerate(clause) if not oracle.conflict(lit, lit)]
    cons = []
    for j in range(1, len(threes) + 1):
        for k in range(j + 1, len(threes) + 1):
            for a in doms[j]:
                for b in doms[k]:
                    if oracle.conflict(threes[j - 1][a - 1], threes[k - 1][b - 1]):
                        cons.append(((j, a), (k, b)))
    return build_instance(doms, cons)


def unit_propagate(formula: CnfFormula) -> tuple[CnfFormula, dict[int, bool]] | None:
    """Simplify by unit clauses.  Returns the reduced formula and forced values, or None."""
    forced: dict[int, bool] = {}
    clauses = [tuple(dict.fromkeys(c)) for c in formula.clauses]
    clauses = [c for c in clauses if not any(-l in c for l in c)]
    while True:
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        forced[abs(unit)] = unit > 0
        out = []
        for c in clauses:
            if unit in c:
                continue
            c = tuple(l for l in c if l != -unit)
            if not c:
                return None
            out.append(c)
        clauses = out
    return CnfFormula(formula.num_vars, clauses), forced


@dataclass
class SatResult:
    model: dict[int, bool] | None
    t: int
    stats: cspsolver.SearchStats | None = None


def solve_3sat(formula: CnfFormula) -> SatResult:
    """Decide a 3-CNF formula; a returned model is checked against every clause."""
    if formula.has_empty_clause():
        return SatResult(None, formula.t)
    reduced = unit_propagate(formula)
    if reduced is None:
        return SatResult(None, formula.t)
    rest, forced = reduced
    oracle = TwoCnf(rest.num_vars, rest.short_clauses())
    if oracle.solve() is None:
        return SatResult(None, rest.t)
    inst = translate_3sat(rest, oracle)
    choice, stats = cspsolver.solve(inst)
    if choice is None:
        return SatResult(None, rest.t, stats)
    threes = rest.three_clauses()
    designated = [threes[k - 1][c - 1] for k, c in sorted(choice.items())]
    completion = oracle.solve(designated)
    if completion is None:
        raise AssertionError("pairwise-compatible designations failed to complete")
    model = {v: forced.get(v, completion[v]) for v in range(1, formula.num_vars + 1)}
    if not formula.satisfied_by(model):
        raise AssertionError("model does not satisfy the formula")
    return SatResult(model, rest.t, stats)


def brute_force_sat(formula: CnfFormula) -> dict[int, bool] | None:
    """Exhaustive search over all 2^n assignments (first model in binary order)."""
    n = formula.num_vars
    for bits in range(1 << n):
        model = {v: bool(bits >> (v - 1) & 1) for v in range(1, n + 1)}
        if formula.satisfied_by(model):
            return model
    return None


# -- DIMACS CNF ---------------------------------------------------------------------

def parse_dimacs_cnf(text: str) -> CnfFormula:
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if header is not None or len(tokens) != 4 or tokens[1] != "cnf":
                raise CnfFormatError("expected a single 'p cnf <n> <m>' line", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise CnfFormatError("non-integer counts", lineno) from None
            continue
        if header is None:
            raise CnfFormatError("clause before problem line", lineno)
        for tok in tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise CnfFormatError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if len(current) > 3:
                    raise CnfFormatError("clauses longer than three literals are not supported", lineno)
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise CnfFormatError(f"literal {lit} exceeds declared variable count", lineno)
                current.append(lit)
    if header is None:
        raise CnfFormatError("missing problem line")
    if current:
        raise CnfFormatError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise CnfFormatError(f"declared {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], clauses)


def format_dimacs_cnf(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines.extend(" ".join(str(l) for l in c + (0,)) for c in formula.clauses)
    return "\n".join(lines) + "\n"


def format_model(model: dict[int, bool]) -> str:
    return "v " + " ".join(str(v if model[v] else -v) for v in sorted(model)) + " 0"
