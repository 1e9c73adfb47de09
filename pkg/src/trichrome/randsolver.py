"""Randomized solvers for (d,2)-CSP by random domain restriction.

restrict4 keeps a uniform 4-subset of each domain and solves the (4,2)-CSP
deterministically; pairs keeps a uniform 2-subset and solves 2-SAT.  A
fixed solution survives a trial with probability (k/d)^n, so after T failed
trials the chance of having missed a solvable instance is at most
(1 - (k/d)^n)^T.  Trial t draws from ``default_rng([seed, t])``, so any
subset of trials can be replayed independently.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cspsolver
from .cspcore import ContractViolation, CspInstance, is_solution, solve_22csp

SAT, UNSAT, UNSAT_LIKELY, UNKNOWN = "SAT", "UNSAT", "UNSAT-likely", "UNKNOWN"


@dataclass(frozen=True)
class TrialPolicy:
    max_trials: int = 1000
    seed: int = 0
    delta: float = 1e-3

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be at least 1")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


@dataclass
class RandomResult:
    status: str
    assignment: dict | None
    trials: int
    success_probability: float
    residual: float
    keep: int
    stats: dict = field(default_factory=dict)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def restrict(inst: CspInstance, keep: int, rng: np.random.Generator) -> CspInstance:
    """Keep a uniform ``keep``-subset of every domain (whole domain if smaller)."""
    out = inst.copy()
    for v in sorted(inst.domains):
        colors = sorted(inst.domains[v])
        if len(colors) <= keep:
            continue
        kept = {colors[i] for i in rng.choice(len(colors), size=keep, replace=False)}
        for c in colors:
            if c not in kept:
                out._drop_pair((v, c))
    return out


def restrict4_trial(inst: CspInstance, rng: np.random.Generator) -> dict | None:
    sol, _ = cspsolver.solve(restrict(inst, 4, rng))
    return sol


def pairs_trial(inst: CspInstance, rng: np.random.Generator) -> dict | None:
    return solve_22csp(restrict(inst, 2, rng))


def success_probability(inst: CspInstance, keep: int) -> float:
    """Lower bound (keep/d)^n on a trial keeping a fixed solution (per-variable exact)."""
    p = 1.0
    for d in inst.domains.values():
        if len(d) > keep:
            p *= keep / len(d)
    return p


def _run(inst: CspInstance, policy: TrialPolicy, keep: int, trial_fn, parallel: bool,
         workers: int | None) -> RandomResult:
    p = success_probability(inst, keep)
    if any(not d for d in inst.domains.values()):
        return RandomResult(UNSAT, None, 0, p, 0.0, keep)
    if p == 1.0:
        # nothing to restrict: one deterministic trial decides
        sol = trial_fn(inst, trial_rng(policy.seed, 0))
        if sol is None:
            return RandomResult(UNSAT, None, 1, p, 0.0, keep)
        return _accept(inst, sol, 1, p, keep)
    if parallel:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_indexed_trial, inst, policy.seed, t, keep)
                       for t in range(policy.max_trials)]
            # first success in trial order, so the answer matches the sequential run
            for t, fut in enumerate(futures):
                sol = fut.result()
                if sol is not None:
                    for rest in futures[t + 1:]:
                        rest.cancel()
                    return _accept(inst, sol, t + 1, p, keep)
    else:
        for t in range(policy.max_trials):
            sol = trial_fn(inst, trial_rng(policy.seed, t))
            if sol is not None:
                return _accept(inst, sol, t + 1, p, keep)
    residual = (1 - p) ** policy.max_trials
    status = UNSAT_LIKELY if residual <= policy.delta else UNKNOWN
    return RandomResult(status, None, policy.max_trials, p, residual, keep)


def _indexed_trial(inst: CspInstance, seed: int, trial: int, keep: int) -> dict | None:
    fn = restrict4_trial if keep == 4 else pairs_trial
    return fn(inst, trial_rng(seed, trial))


def _accept(inst, sol, trials, p, keep) -> RandomResult:
    if not is_solution(inst, sol):
        raise AssertionError("randomized trial returned an invalid assignment")
    return RandomResult(SAT, sol, trials, p, 0.0, keep)


def solve_random_restrict4(inst: CspInstance, policy: TrialPolicy = TrialPolicy(),
                           parallel: bool = False, workers: int | None = None) -> RandomResult:
    if inst.max_colors() <= 3:
        raise ContractViolation("restrict4 needs d >= 4 colors")
    return _run(inst, policy, 4, restrict4_trial, parallel, workers)


def solve_random_pairs(inst: CspInstance, policy: TrialPolicy = TrialPolicy(),
                       parallel: bool = False, workers: int | None = None) -> RandomResult:
    if inst.max_colors() < 2:
        raise ContractViolation("random pairs needs d >= 2 colors")
    return _run(inst, policy, 2, pairs_trial, parallel, workers)
