import math

import pytest

from corpora import empirical_rate, exact_trial_success, planted_unique, solvable_dcsp
from trichrome import cspsolver
from trichrome.cspcore import ContractViolation, brute_force_solve, build_instance, from_graph_coloring, is_solution
from trichrome.generators import random_csp, random_dcsp
from trichrome.graphkit import complete_graph
from trichrome.randsolver import (SAT, UNKNOWN, UNSAT, UNSAT_LIKELY, TrialPolicy, pairs_trial, restrict,
                                  restrict4_trial, solve_random_pairs, solve_random_restrict4,
                                  success_probability, trial_rng)


def within_3_sigma(rate, p, trials):
    return abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / trials) + 1e-12


# -- policy and contracts ----------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [{"max_trials": 0}, {"delta": 0.0}, {"delta": 1.0}])
def test_policy_validation(kwargs):
    with pytest.raises(ValueError):
        TrialPolicy(**kwargs)


def test_restrict4_rejects_three_colors():
    with pytest.raises(ContractViolation):
        solve_random_restrict4(random_csp(4, 1.0, 0))


def test_pairs_rejects_one_color():
    with pytest.raises(ContractViolation):
        solve_random_pairs(build_instance({1: [1], 2: [1]}))


# -- degenerate single trials -----------------------------------------------------------------

def test_four_colors_is_one_deterministic_trial():
    for seed in range(10):
        inst = random_dcsp(6, 4, 4.0, seed)
        res = solve_random_restrict4(inst)
        assert res.trials == 1 and res.success_probability == 1.0
        assert (res.status == SAT) == (cspsolver.solve(inst)[0] is not None)
        assert res.status in (SAT, UNSAT)


def test_two_colors_is_one_deterministic_trial():
    for seed in range(10):
        inst = random_dcsp(6, 2, 1.5, seed)
        res = solve_random_pairs(inst)
        assert res.trials == 1
        assert (res.status == SAT) == (brute_force_solve(inst) is not None)


def test_restriction_keeps_subsets():
    inst = random_dcsp(5, 5, 3.0, 1)
    small = restrict(inst, 4, trial_rng(0, 0))
    for v in inst.variables:
        assert len(small.colors(v)) == 4 and set(small.colors(v)) <= set(inst.colors(v))
    assert set(small.constraints()) <= set(inst.constraints())


# -- statuses ----------------------------------------------------------------------------------

def test_unsat_likely_and_unknown():
    k4 = from_graph_coloring(complete_graph(4))
    res = solve_random_pairs(k4, TrialPolicy(max_trials=100))
    assert res.status == UNSAT_LIKELY and res.residual <= 1e-3
    assert res.residual == pytest.approx((1 - (2 / 3) ** 4) ** 100)
    res = solve_random_pairs(k4, TrialPolicy(max_trials=2))
    assert res.status == UNKNOWN and res.residual > 1e-3


def test_empty_domain_is_unsat():
    inst = build_instance({1: [], 2: [1, 2, 3, 4, 5]})
    assert solve_random_restrict4(inst).status == UNSAT


def test_solutions_are_valid_on_original():
    for seed in range(8):
        for inst, _ in solvable_dcsp(6, 5, 20.0, seed, 1):
            res = solve_random_restrict4(inst, TrialPolicy(seed=seed))
            assert res.status == SAT and is_solution(inst, res.assignment)
        for inst, _ in solvable_dcsp(6, 3, 4.0, seed, 1):
            res = solve_random_pairs(inst, TrialPolicy(seed=seed))
            assert res.status == SAT and is_solution(inst, res.assignment)


# -- exact success probabilities ---------------------------------------------------------------

def test_planted_instances_hit_the_analytic_rate():
    inst, planted = planted_unique(6, 5, 0)
    assert brute_force_solve(inst) == planted
    assert exact_trial_success(inst, 4) == pytest.approx((4 / 5) ** 6)
    assert success_probability(inst, 4) == pytest.approx((4 / 5) ** 6)
    inst, _ = planted_unique(6, 3, 1)
    assert exact_trial_success(inst, 2) == pytest.approx((2 / 3) ** 6)


def test_exact_rate_is_at_least_analytic():
    for inst, sols in solvable_dcsp(6, 3, 6.0, 3, 10):
        assert exact_trial_success(inst, 2, sols) >= (2 / 3) ** 6 - 1e-12


# -- statistical gates ------------------------------------------------------------------------

def test_restrict4_rate_gate():
    trials = 1000
    for inst, sols in solvable_dcsp(6, 5, 28.0, 1, 2):
        p = exact_trial_success(inst, 4, sols)
        rate = empirical_rate(inst, restrict4_trial, trials, seed=17)
        assert rate >= (4 / 5) ** 6 / 2
        assert within_3_sigma(rate, p, trials)


def test_pairs_rate_gate_on_unique_solution_instances():
    trials = 2000
    for inst, sols in solvable_dcsp(6, 3, 6.0, 2, 3, unique=True):
        assert exact_trial_success(inst, 2, sols) == pytest.approx((2 / 3) ** 6)
        rate = empirical_rate(inst, pairs_trial, trials, seed=23)
        assert within_3_sigma(rate, (2 / 3) ** 6, trials)


# -- reproducibility ---------------------------------------------------------------------------

def test_fixed_seed_is_reproducible():
    inst, _ = solvable_dcsp(6, 3, 6.0, 4, 1, unique=True)[0]
    a = solve_random_pairs(inst, TrialPolicy(seed=9))
    b = solve_random_pairs(inst, TrialPolicy(seed=9))
    assert repr(a) == repr(b)
    streams = [trial_rng(9, t).integers(0, 2 ** 62, size=4).tolist() for t in range(3)]
    assert streams == [trial_rng(9, t).integers(0, 2 ** 62, size=4).tolist() for t in range(3)]


def test_parallel_matches_sequential():
    inst, _ = solvable_dcsp(6, 3, 6.0, 5, 1, unique=True)[0]
    seq = solve_random_pairs(inst, TrialPolicy(seed=3))
    par = solve_random_pairs(inst, TrialPolicy(seed=3), parallel=True, workers=2)
    assert (seq.trials, seq.assignment) == (par.trials, par.assignment)
