"""Acceptance criteria 1-9, each reported as one pass/fail line in the terminal summary."""

import math
from itertools import combinations, product

import numpy as np
import pytest

from corpora import (check_rule_step, cover_corpus, csp_oracle_corpus, empirical_rate,
                     exact_trial_success, product_solutions, rule_triggers, solvable_dcsp)
from trichrome import cspsolver
from trichrome.cli import bench, format_report
from trichrome.cspcore import RuleNotApplicable, brute_force_solve, is_solution
from trichrome.edgecolor import (EdgeProblem, brute_force_edge_coloring, is_edge_coloring,
                                 splice_children, solve_3edge)
from trichrome.generators import random_3cnf, random_graph, random_regular_graph, random_subcubic_graph
from trichrome.graphkit import complete_bipartite, complete_graph, cycle_graph, petersen_graph
from trichrome.randsolver import (TrialPolicy, pairs_trial, restrict4_trial, solve_random_pairs,
                                  solve_random_restrict4)
from trichrome.satfront import CnfFormula, brute_force_sat, solve_3sat, translate_3sat
from trichrome.vertexcolor import (CoverError, accounting, brute_force_coloring, build_height2_forest,
                                   check_bushy_forest, check_height2_forest, find_bushy_forest,
                                   is_proper_coloring, solve_3coloring)
from trichrome.workfactor import EPSILON, LAMBDA, optimize_epsilon, paper_constants, work_factor


def test_criterion_1_constants(criterion):
    consts = paper_constants()
    eps, _ = optimize_epsilon()
    checks = {
        "lambda(4,4,5,5)": (work_factor([4, 4, 5, 5]), 1.36443, 1e-5),
        "epsilon": (eps, 0.095543, 1e-5),
        "Lambda^(2-eps)": (LAMBDA ** (2 - eps), 1.8072, 1e-4),
        "vertex base": (2 ** (3 / 49) * 3 ** (4 / 49) * LAMBDA ** (24 / 49), 1.3289, 1e-4),
    }
    for d, want in zip(range(4, 9), (1.8072, 2.2590, 2.7108, 3.1626, 3.6144)):
        checks[f"dcsp d={d}"] = (consts[f"dcsp_{d}"], want, 1e-3)
    bad = [k for k, (got, want, tol) in checks.items() if abs(got - want) > tol]
    detail = f"{len(checks) - len(bad)}/{len(checks)} constants within tolerance" + (f"; off: {bad}" if bad else "")
    assert criterion(1, not bad, detail)


def test_criterion_2_csp_oracle(criterion):
    corpus = csp_oracle_corpus(1000)
    mismatches = invalid = four = 0
    for inst in corpus:
        sol, _ = cspsolver.solve(inst)
        truth = brute_force_solve(inst)
        mismatches += (sol is None) != (truth is None)
        invalid += sol is not None and not is_solution(inst, sol)
        four += inst.max_colors() == 4
    ok = len(corpus) >= 1000 and mismatches == 0 and invalid == 0 and four > 0
    assert criterion(2, ok, f"{len(corpus)} instances ({four} with 4-color variables), "
                            f"{mismatches} verdict mismatches, {invalid} invalid solutions")


def test_criterion_3_rule_soundness(criterion):
    cases = rule_triggers()
    problems, log = [], []
    above, above_size = 0, 0.0
    for rule in cspsolver.RULES:
        worst, shortfalls, min_dec, short_size = 1.0, 0, math.inf, 0.0
        for original, parent, trail, step in cases[rule]:
            found, decs = check_rule_step(original, parent, trail, step)
            problems += [f"{rule}: {p}" for p in found]
            min_dec = min([min_dec] + decs)
            live = [b.decrement for b in step.branches if b.child is not None]
            factor = work_factor(live) if live else 1.0
            worst = max(worst, factor)
            if factor > cspsolver.claimed_work_factor(rule, EPSILON) + 1e-9:
                shortfalls += 1
                short_size = max(short_size, parent.size())
        above += shortfalls
        above_size = max(above_size, short_size)
        if len(cases[rule]) < 200:
            problems.append(f"{rule}: only {len(cases[rule])} triggers")
        log.append(f"{rule} n={len(cases[rule])} min_dec={min_dec:.3f} worst={worst:.4f} "
                   f"claimed={cspsolver.claimed_work_factor(rule, EPSILON):.4f} above_claim={shortfalls}"
                   + (f" (parents of size <= {short_size:.2f})" if shortfalls else ""))
    for line in log:
        print("  " + line)
    detail = (f"{sum(len(c) for c in cases.values())} triggers over R1-R9, {len(problems)} soundness problems; "
              f"{above} branchings above the claimed factor, all on parents of size <= {above_size:.2f}")
    assert criterion(3, not problems, detail), problems[:5]


def test_criterion_4_base_case(criterion):
    seen, wrong = [], []

    def hook(inst, result):
        truth = bool(product_solutions(inst, limit=1))
        direct = cspsolver.matching_base_case(inst)
        seen.append(inst)
        if (result is not None) != truth or (direct is not None) != truth:
            wrong.append(inst)
        if result is not None and not is_solution(inst, result):
            wrong.append(inst)

    for inst in csp_oracle_corpus(1000):
        cspsolver.solve(inst, on_base_case=hook)
    sat = sum(bool(product_solutions(i, limit=1)) for i in seen)
    ok = len(seen) > 0 and not wrong and 0 < sat < len(seen)
    assert criterion(4, ok, f"{len(seen)} base cases ({sat} SAT, {len(seen) - sat} UNSAT), "
                            f"{len(wrong)} disagreements")


def test_criterion_5_vertex_coloring(criterion):
    fixtures = {"K3": (complete_graph(3), True), "K4": (complete_graph(4), False),
                "C5": (cycle_graph(5), True), "Petersen": (petersen_graph(), True)}
    bad = []
    for name, (g, want) in fixtures.items():
        res = solve_3coloring(g)
        if (res.coloring is not None) != want or (want and not is_proper_coloring(g, res.coloring)):
            bad.append(name)
    rng = np.random.default_rng(555)
    mismatches, covers, cover_problems = 0, 0, []
    for i in range(300):
        g = random_graph(int(rng.integers(1, 11)), float(rng.uniform(0.2, 0.8)), [555, i])
        res = solve_3coloring(g)
        mismatches += (res.coloring is not None) != (brute_force_coloring(g) is not None)
        for acc, problems in res.stats.covers:
            covers += 1
            cover_problems += problems
    for g in cover_corpus():
        forest = find_bushy_forest(g)
        try:
            h2 = build_height2_forest(g, forest)
        except CoverError:
            continue
        covers += 1
        acc = accounting(g, forest, h2)
        cover_problems += (check_bushy_forest(g, forest) + check_height2_forest(g, forest, h2)
                           + acc.constraint_violations())
    ok = not bad and mismatches == 0 and not cover_problems and covers > 0
    assert criterion(5, ok, f"fixtures ok={not bad}, 300 graphs with {mismatches} mismatches, "
                            f"{covers} covers with {len(cover_problems)} invariant violations")


def test_criterion_6_edge_coloring(criterion):
    fixtures = {"K4": (complete_graph(4), True), "K3,3": (complete_bipartite(3, 3), True),
                "Petersen": (petersen_graph(), False)}
    bad = [name for name, (g, want) in fixtures.items() if (solve_3edge(g.edges()) is not None) != want]
    rng = np.random.default_rng(666)
    mismatches = invalid = 0
    for i in range(200):
        g = random_subcubic_graph(int(rng.integers(2, 11)), float(rng.uniform(0.3, 0.9)), [666, i])
        sol = solve_3edge(g.edges())
        mismatches += (sol is None) != (brute_force_edge_coloring(g.edges()) is None)
        invalid += sol is not None and not is_edge_coloring(g.edges(), [], sol)
    splices = shrink_errors = 0
    for seed in range(40):
        prob = EdgeProblem.build(random_regular_graph(4 + 2 * (seed % 4), 3, seed).edges())
        nv = len(prob.incidence())
        for e in sorted(prob.edges):
            try:
                children = splice_children(prob, e)
            except RuleNotApplicable:
                continue
            for child in children:
                splices += 1
                shrink_errors += (len(prob.edges) - len(child.edges), nv - len(child.incidence())) != (3, 2)
    ok = not bad and mismatches == 0 and invalid == 0 and splices > 0 and shrink_errors == 0
    assert criterion(6, ok, f"fixtures ok={not bad}, 200 subcubic graphs with {mismatches} mismatches, "
                            f"{splices} splice children with {shrink_errors} size errors")


def test_criterion_7_sat(criterion):
    rng = np.random.default_rng(777)
    mismatches = invalid = size_errors = 0
    for i in range(500):
        n = int(rng.integers(3, 7))
        f = random_3cnf(n, int(rng.integers(1, 4 * n + 1)), [777, i],
                        two_clauses=int(rng.integers(0, 4)), unit_clauses=int(rng.integers(0, 2)))
        res = solve_3sat(f)
        mismatches += (res.model is None) != (brute_force_sat(f) is None)
        invalid += res.model is not None and not f.satisfied_by(res.model)
        f3 = CnfFormula(n, f.three_clauses() + [c for c in f.clauses if len(c) == 2])
        size_errors += len(translate_3sat(f3).variables) != f3.t
    all_three = [tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in product((1, -1), repeat=3)]
    exhaustive = exhaustive_bad = 0
    for k in range(6):
        for subset in combinations(all_three, k):
            f = CnfFormula(3, list(subset))
            exhaustive += 1
            exhaustive_bad += (solve_3sat(f).model is None) != (brute_force_sat(f) is None)
    ok = mismatches == invalid == size_errors == exhaustive_bad == 0
    assert criterion(7, ok, f"500 random formulas with {mismatches} mismatches, {exhaustive} exhaustive "
                            f"formulas with {exhaustive_bad} mismatches, {size_errors} size errors")


def test_criterion_8_randomized(criterion):
    gates = []
    for inst, sols in solvable_dcsp(6, 5, 28.0, 1, 2):
        p, trials = exact_trial_success(inst, 4, sols), 1000
        rate = empirical_rate(inst, restrict4_trial, trials, seed=17)
        gates.append(("restrict4", rate, p, trials, p >= (4 / 5) ** 6 - 1e-12))
    for inst, sols in solvable_dcsp(6, 3, 6.0, 2, 3, unique=True):
        p, trials = exact_trial_success(inst, 2, sols), 2000
        rate = empirical_rate(inst, pairs_trial, trials, seed=23)
        gates.append(("pairs", rate, p, trials, abs(p - (2 / 3) ** 6) < 1e-12))
    failed = [g for g in gates
              if not g[4] or abs(g[1] - g[2]) > 3 * math.sqrt(g[2] * (1 - g[2]) / g[3])]
    for name, rate, p, trials, _ in gates:
        print(f"  {name}: rate={rate:.4f} exact={p:.4f} trials={trials}")
    inst5, _ = solvable_dcsp(6, 5, 28.0, 3, 1)[0]
    inst3, _ = solvable_dcsp(6, 3, 6.0, 4, 1, unique=True)[0]
    runs = [format_report({"r": repr(solve_random_restrict4(inst5, TrialPolicy(seed=7)))
                          + repr(solve_random_pairs(inst3, TrialPolicy(seed=7)))}) for _ in range(2)]
    reproducible = runs[0] == runs[1]
    ok = not failed and reproducible
    assert criterion(8, ok, f"{len(gates) - len(failed)}/{len(gates)} statistical gates within 3 sigma, "
                            f"fixed-seed rerun identical={reproducible}")


def test_criterion_9_scaling(criterion):
    rows = []
    for n in (15, 20, 25):
        fields = bench("csp", n, 50, seed=2025, density=7.0, oracle_limit=0)
        rows.append((n, fields["effective_work_factor_median"], fields["effective_work_factor_max"],
                     fields["target_work_factor"]))
    for n, med, mx, target in rows:
        print(f"  n={n}: effective median={med:.4f} max={mx:.4f} Lambda={target:.5f}")
    ok = (all(math.isfinite(m) and math.isfinite(x) and 1.0 <= m <= x for _, m, x, _ in rows)
          and [r[0] for r in rows] == sorted(r[0] for r in rows)
          and all(t == pytest.approx(LAMBDA) for *_, t in rows))
    summary = ", ".join(f"n={n}: {med:.4f}" for n, med, _, _ in rows)
    assert criterion(9, ok, f"median effective factor {summary} (Lambda={LAMBDA:.5f}; bound not asserted)")
