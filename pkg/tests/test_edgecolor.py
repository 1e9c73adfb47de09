import numpy as np
import pytest

from trichrome.cspcore import RuleNotApplicable
from trichrome.edgecolor import (EdgeProblem, EdgeStats, Unsatisfiable, brute_force_edge_coloring,
                                 is_edge_coloring, neighbor_counts, normalize, replay,
                                 select_splices, splice_children, solve_3edge)
from trichrome.generators import random_regular_graph, random_subcubic_graph
from trichrome.graphkit import complete_bipartite, complete_graph, path_graph, petersen_graph


def problem_oracle(prob):
    """Brute-force solvability of an EdgeProblem with arbitrary edge ids."""
    if any(e in prob.cons[e] for e in prob.edges):
        return False
    ids = sorted(prob.edges)
    index = {e: i for i, e in enumerate(ids)}
    edges = [prob.edges[e] for e in ids]
    cons = {(index[e], index[f]) for e in ids for f in prob.cons[e] if index[e] < index[f]}
    return brute_force_edge_coloring(edges, cons) is not None


def vertex_count(prob):
    return len(prob.incidence())


def random_constraints(edges, rng, rate):
    m = len(edges)
    return [(i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < rate]


# -- fixtures ---------------------------------------------------------------------------

@pytest.mark.parametrize("graph,colorable", [
    (complete_graph(4), True), (complete_bipartite(3, 3), True), (petersen_graph(), False),
    (path_graph(4), True), (complete_graph(3), True), (complete_bipartite(1, 4), False),
])
def test_fixtures(graph, colorable):
    edges = graph.edges()
    sol = solve_3edge(edges)
    assert (sol is not None) == colorable
    if colorable:
        assert is_edge_coloring(edges, [], sol)


def test_constraint_can_make_k4_unsat():
    edges = complete_graph(4).edges()
    # opposite edges must share a color in every 3-edge-coloring of K4
    opposite = [(i, j) for i, (a, b) in enumerate(edges) for j, (c, d) in enumerate(edges)
                if i < j and not {a, b} & {c, d}]
    assert solve_3edge(edges, opposite[:1]) is None
    assert brute_force_edge_coloring(edges, opposite[:1]) is None


# -- normalize ---------------------------------------------------------------------------

def test_degree_four_is_unsat():
    with pytest.raises(Unsatisfiable):
        normalize(EdgeProblem.build(complete_bipartite(1, 4).edges()), [])


def test_path_is_fully_removed_and_reextended():
    prob = EdgeProblem.build(path_graph(4).edges())
    trail = []
    normalize(prob, trail)
    assert prob.edges == {} and len(trail) == 3
    col = replay(trail, {})
    assert is_edge_coloring(path_graph(4).edges(), [], col)


def test_normalize_preserves_solvability():
    rng = np.random.default_rng(3)
    for i in range(150):
        g = random_subcubic_graph(int(rng.integers(2, 11)), 0.5, [3, i])
        edges = g.edges()
        cons = random_constraints(edges, rng, 0.05)
        truth = brute_force_edge_coloring(edges, cons) is not None
        prob, trail = EdgeProblem.build(edges, cons), []
        try:
            normalize(prob, trail)
        except Unsatisfiable:
            assert not truth
            continue
        assert problem_oracle(prob) == truth
        if truth:
            sol = brute_force_edge_coloring([prob.edges[e] for e in sorted(prob.edges)],
                                            [(sorted(prob.edges).index(e), sorted(prob.edges).index(f))
                                             for e in prob.edges for f in prob.cons[e] if e < f])
            ids = sorted(prob.edges)
            col = replay(trail, {ids[k]: c for k, c in (sol or {}).items()})
            assert is_edge_coloring(edges, cons, col)


# -- splice ------------------------------------------------------------------------------

def test_splice_shrinks_by_three_edges_and_two_vertices():
    prob = EdgeProblem.build(complete_graph(4).edges())
    c1, c2 = splice_children(prob, 0)
    for child in (c1, c2):
        assert len(child.edges) == len(prob.edges) - 3
        assert vertex_count(child) == vertex_count(prob) - 2
        new = sorted(set(child.edges) - set(prob.edges))
        assert len(new) == 2 and new[1] in child.cons[new[0]]


def test_splice_preconditions():
    with pytest.raises(RuleNotApplicable):
        splice_children(EdgeProblem.build(path_graph(4).edges()), 1)
    prob = EdgeProblem.build(complete_graph(4).edges(), [(0, 5)])
    with pytest.raises(RuleNotApplicable):
        splice_children(prob, 0)


def test_k4_splice_keeps_solvability():
    prob = EdgeProblem.build(complete_graph(4).edges())
    assert any(problem_oracle(c) for c in splice_children(prob, 0))


@pytest.mark.parametrize("seed", range(40))
def test_splice_equivalence_on_cubic_graphs(seed):
    n = 4 + 2 * (seed % 4)
    g = random_regular_graph(n, 3, seed)
    prob = EdgeProblem.build(g.edges())
    truth = problem_oracle(prob)
    spliced = 0
    for e in sorted(prob.edges):
        try:
            c1, c2 = splice_children(prob, e)
        except RuleNotApplicable:
            continue
        spliced += 1
        assert (problem_oracle(c1) or problem_oracle(c2)) == truth
        for child in (c1, c2):
            assert len(child.edges) == len(prob.edges) - 3
            assert vertex_count(child) == vertex_count(prob) - 2
    assert spliced >= 1


# -- selection ------------------------------------------------------------------------------

def test_k4_selection_and_counts():
    prob = EdgeProblem.build(complete_graph(4).edges())
    assert neighbor_counts(prob) == (0, 6)
    assert len(select_splices(prob)) >= 1


def test_path_has_empty_selection():
    assert select_splices(EdgeProblem.build(path_graph(5).edges())) == []


@pytest.mark.parametrize("seed", range(30))
def test_selected_splices_are_independent(seed):
    n = 4 + 2 * (seed % 9)
    prob = EdgeProblem.build(random_regular_graph(n, 3, seed).edges())
    chosen = select_splices(prob)
    inc = prob.incidence()
    for i, e in enumerate(chosen):
        assert not prob.cons[e]
        u, v = prob.edges[e]
        assert len(inc[u]) == len(inc[v]) == 3
        for f in chosen[i + 1:]:
            assert not set(prob.edges[e]) & set(prob.edges[f])
            near_e = {x for g in prob.conflicts(e, inc) | {e} for x in prob.edges[g]}
            assert not near_e & set(prob.edges[f])


# -- end to end --------------------------------------------------------------------------

def test_oracle_sweep_unconstrained():
    rng = np.random.default_rng(11)
    checked = 0
    for i in range(220):
        g = random_subcubic_graph(int(rng.integers(2, 11)), float(rng.uniform(0.3, 0.9)), [11, i])
        edges = g.edges()
        sol = solve_3edge(edges)
        assert (sol is not None) == (brute_force_edge_coloring(edges) is not None)
        if sol is not None:
            assert is_edge_coloring(edges, [], sol)
        checked += 1
    assert checked >= 200


def test_oracle_sweep_constrained():
    rng = np.random.default_rng(12)
    spliced = 0
    for i in range(200):
        n = 4 + 2 * int(rng.integers(0, 4))
        g = random_regular_graph(n, 3, [12, i]) if i % 2 else random_subcubic_graph(n, 0.6, [12, i])
        edges = g.edges()
        cons = random_constraints(edges, rng, 0.04)
        stats = EdgeStats()
        sol = solve_3edge(edges, cons, stats)
        assert (sol is not None) == (brute_force_edge_coloring(edges, cons) is not None)
        if sol is not None:
            assert is_edge_coloring(edges, cons, sol)
        spliced += stats.splices
    assert spliced > 50


def test_stats_report():
    stats = EdgeStats()
    solve_3edge(random_regular_graph(10, 3, 5).edges(), stats=stats)
    d = stats.as_dict()
    assert d["m4"] == 15 and d["splice_target"] == 5
    assert 1 <= d["splices"] and d["children"] >= 1
