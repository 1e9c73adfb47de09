"""Work factors of branching recurrences.

A branching rule that replaces an instance of size n by instances of sizes
n - r_1, ..., n - r_k leads to the recurrence T(n) = sum T(n - r_i), whose
growth rate is the largest zero of f(x) = 1 - sum x**(-r_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

ROOT_TOL = 1e-12
EPSILON_BRACKET = (0.0, 0.5)


class InvalidQuery(ValueError):
    pass


def _validate(reductions: Iterable[float]) -> tuple[float, ...]:
    rs = tuple(float(r) for r in reductions)
    if not rs:
        raise InvalidQuery("work factor needs at least one size reduction")
    for r in rs:
        if not (r > 0) or math.isinf(r):
            raise InvalidQuery(f"size reductions must be positive and finite, got {r!r}")
    return rs


def characteristic(x: float, reductions: Sequence[float]) -> float:
    """f(x) = 1 - sum x**(-r) for the given reductions."""
    return 1.0 - math.fsum(x ** (-r) for r in reductions)


def work_factor(reductions: Iterable[float]) -> float:
    """Largest zero of ``1 - sum x**(-r)``.

    f is strictly increasing on (0, inf), so the zero is unique.  The search
    starts from the bracket [1, 1 + k] and widens it when small reductions
    push the root further out, then bisects and polishes with Newton steps.

    >>> work_factor([1, 1])
    2.0
    """
    rs = _validate(reductions)
    if len(rs) == 1:
        return 1.0
    lo, hi = 1.0, 1.0 + len(rs)
    while characteristic(hi, rs) < 0.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if characteristic(mid, rs) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    # Newton polish; the bracket keeps a bad step from escaping.
    for _ in range(8):
        fx = characteristic(x, rs)
        if abs(fx) <= ROOT_TOL * 1e-3:
            break
        dfx = math.fsum(r * x ** (-r - 1.0) for r in rs)
        step = x - fx / dfx
        if not (lo <= step <= hi):
            break
        x = step
    return x


@dataclass(frozen=True)
class SizeMeasure:
    """Weighted instance size n_3 + (2 - epsilon) * n_4."""

    epsilon: float

    def __post_init__(self):
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")

    def weight(self, ncolors: int) -> float:
        """Contribution of one variable with ``ncolors`` allowed colors."""
        if ncolors <= 1:
            return 0.0
        if ncolors <= 3:
            return 1.0
        if ncolors == 4:
            return 2.0 - self.epsilon
        raise ValueError("the size measure is defined for at most four colors")

    def size(self, n3: int, n4: int, n2: int = 0) -> float:
        return n2 + n3 + (2.0 - self.epsilon) * n4


def _balance(eps: float) -> float:
    return work_factor([3 - eps, 4 - eps, 4 - eps]) - work_factor([1 + eps, 4])


def optimize_epsilon(tol: float = 1e-13) -> tuple[float, float]:
    """Find the epsilon balancing lambda(3-e, 4-e, 4-e) against lambda(1+e, 4).

    The first factor increases with epsilon and the second decreases, so
    their difference is monotone and bisection over [0, 0.5] converges to
    the unique crossing.  Returns ``(epsilon, lambda)``.
    """
    lo, hi = EPSILON_BRACKET
    assert _balance(lo) < 0.0 < _balance(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _balance(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    eps = 0.5 * (lo + hi)
    return eps, work_factor([1 + eps, 4])


EPSILON, _LAMBDA_AT_EPSILON = optimize_epsilon()
LAMBDA = work_factor([4, 4, 5, 5])
DEFAULT_MEASURE = SizeMeasure(EPSILON)


def vertex_coloring_base(lam: float = LAMBDA) -> float:
    """Per-vertex base 2^(3/49) * 3^(4/49) * lam^(24/49) of the 3-coloring bound."""
    return 2.0 ** (3 / 49) * 3.0 ** (4 / 49) * lam ** (24 / 49)


def paper_constants() -> dict[str, float]:
    """Named constants of the running-time bounds.

    ``restrict4_base`` is the per-variable cost of one (4,2)-CSP trial
    (lambda^(2-epsilon)); ``dcsp[d]`` entries are the (d,2)-CSP bases
    ``d * lambda^(2-epsilon) / 4`` for d = 4..8, with d = 3 given by lambda.
    """
    eps, _ = optimize_epsilon()
    trial = LAMBDA ** (2.0 - eps)
    table = {
        "lambda": LAMBDA,
        "epsilon": eps,
        "restrict4_base": trial,
        "restrict4_per_d": trial / 4.0,
        "vertex_coloring_base": vertex_coloring_base(LAMBDA),
        "edge_coloring_base": math.sqrt(2.0),
        "line_graph_edge_base": vertex_coloring_base(LAMBDA) ** 1.5,
        "degree3_cycle": work_factor([5, 6, 7, 8]),
        "degree3_tree": work_factor([2, 5, 6]),
        "dcsp_3": LAMBDA,
    }
    for d in range(4, 9):
        table[f"dcsp_{d}"] = trial / 4.0 * d
    return table
