import numpy as np
import pytest

from corpora import cover_corpus
from trichrome.cspcore import ContractViolation
from trichrome.generators import random_graph, random_regular_graph
from trichrome.graphkit import Graph, complete_bipartite, complete_graph, cycle_graph, petersen_graph
from trichrome.vertexcolor import (CoverError, ForestAccounting, accounting, brute_force_coloring,
                                   build_height2_forest, check_bushy_forest, check_height2_forest,
                                   degree3_structure, enumerate_and_solve, extend_greedily,
                                   find_bushy_forest, format_coloring, is_proper_coloring,
                                   peel_low_degree, predicted_base, reduce_degree3_structures,
                                   select_tree_vertices, solve_3coloring, solve_list_coloring)
from trichrome.workfactor import LAMBDA, vertex_coloring_base


# -- peeling ----------------------------------------------------------------------

def test_peel_and_extend():
    g = cycle_graph(5)
    core, _, removed = peel_low_degree(g)
    assert len(core) == 0 and sorted(removed) == list(range(5))
    col = extend_greedily(g, {}, removed)
    assert is_proper_coloring(g, col)


def test_peel_keeps_list_tight_vertices():
    g = Graph.from_edges(2, [(0, 1)])
    core, lists, _ = peel_low_degree(g, {0: {1}, 1: {1}})
    assert len(core) == 2 and lists == {0: {1}, 1: {1}}


# -- degree-3 structures -------------------------------------------------------------

def test_cubic_graph_triggers():
    assert reduce_degree3_structures(petersen_graph()) is not None
    assert degree3_structure(petersen_graph())[0] == "cycle"


def test_min_degree_four_does_not_trigger():
    assert reduce_degree3_structures(complete_graph(6)) is None


def test_large_degree3_tree_triggers():
    # a path of eight degree-3 vertices, each with its own K5 pendant pair
    g = Graph(range(8))
    nxt = 8
    for i in range(7):
        g.add_edge(i, i + 1)
    for i in range(8):
        need = 3 - g.degree(i)
        for _ in range(need):
            g.add_vertex(nxt)
            g.add_edge(i, nxt)
            nxt += 1
    hubs = [v for v in g.vertices if v >= 8]
    for a in hubs:
        for b in hubs:
            if a < b:
                g.add_edge(a, b)
    kind, comp = degree3_structure(g)
    assert kind == "tree" and sorted(comp) == list(range(8))


@pytest.mark.parametrize("seed", range(60))
def test_degree3_branches_preserve_colorability(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    g = random_regular_graph(n if n % 2 == 0 else n + 1, 3, seed) if seed % 2 else random_graph(n, 0.5, seed)
    branches = reduce_degree3_structures(g)
    if branches is None:
        return
    truth = brute_force_coloring(g) is not None
    found = False
    for b in branches:
        sub = brute_force_coloring(b.graph, b.lists)
        if sub is not None:
            found = True
            assert is_proper_coloring(g, {**sub, **b.fixed})
    assert found == truth


# -- bushy forest -----------------------------------------------------------------------

def test_star_forest():
    star = complete_bipartite(1, 4)
    f = find_bushy_forest(star)
    assert len(f.trees) == 1 and f.roots == [0]
    acc = accounting(star, f)
    assert (acc.p, acc.q, acc.r, acc.s, acc.t) == (1, 0, 4, 0, 0)
    assert acc.predicted_cost() == 3
    h = build_height2_forest(star, f)
    assert h.trees == []


def test_subcubic_graph_has_empty_forest():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)])
    assert find_bushy_forest(g, check_precondition=False).trees == []


def test_precondition_enforced():
    with pytest.raises(ContractViolation):
        find_bushy_forest(petersen_graph())


def test_forest_and_cover_invariants():
    covers = with_trees = 0
    for g in cover_corpus():
        f = find_bushy_forest(g)
        assert check_bushy_forest(g, f) == []
        try:
            h = build_height2_forest(g, f)
        except CoverError:
            continue
        assert check_height2_forest(g, f, h) == []
        for tree in h.trees:
            has_big = any(g.degree(v) >= 4 for v in tree.vertices)
            assert tree.capacity == (5 if has_big else 3)
            assert len(tree.grandchildren) <= tree.capacity
            assert set(select_tree_vertices(g, tree)) <= set(tree.vertices)
        acc = accounting(g, f, h)
        assert acc.n == len(g) and min(acc.p, acc.q, acc.r, acc.s, acc.t) >= 0
        assert acc.constraint_violations() == []
        assert len(g) - len(f.vertices) <= 20 * acc.r / 3
        covers += 1
        with_trees += bool(h.trees)
    assert covers >= 40 and with_trees >= 1


# -- accounting -----------------------------------------------------------------------

def test_worst_case_ratio():
    # p = 0, r = 2q, s = 2r, t = 14r/3 with n = 49
    assert predicted_base(0, 3, 6, 12, 28) == pytest.approx(1.3289, abs=1e-4)
    assert predicted_base(0, 3, 6, 12, 28) == pytest.approx(vertex_coloring_base(LAMBDA), rel=1e-12)
    acc = ForestAccounting(0, 3, 6, 12, 28)
    assert acc.per_vertex_base() == pytest.approx(predicted_base(0, 3, 6, 12, 28))
    assert acc.constraint_violations() == []


def test_constraint_triple_detects_violations():
    assert ForestAccounting(1, 0, 3, 0, 0).constraint_violations() == ["4p + 2q > r"]
    assert "s > 2r" in ForestAccounting(0, 0, 1, 3, 0).constraint_violations()


# -- enumeration and pipeline ------------------------------------------------------------

@pytest.mark.parametrize("graph,colorable", [
    (complete_graph(3), True), (complete_graph(4), False), (cycle_graph(5), True),
    (petersen_graph(), True), (complete_bipartite(3, 3), True), (Graph(), True),
])
def test_fixtures(graph, colorable):
    res = solve_3coloring(graph)
    assert (res.coloring is not None) == colorable
    if colorable:
        assert is_proper_coloring(graph, res.coloring)


def test_enumeration_directly_on_k4():
    k4 = complete_graph(4)
    f = find_bushy_forest(k4, check_precondition=False)
    assert enumerate_and_solve(k4, f, None) is None


def test_oracle_sweep():
    rng = np.random.default_rng(99)
    for i in range(300):
        n = int(rng.integers(1, 11))
        g = random_graph(n, float(rng.uniform(0.2, 0.8)), [99, i])
        res = solve_3coloring(g)
        assert (res.coloring is not None) == (brute_force_coloring(g) is not None)
        for acc, problems in res.stats.covers:
            assert problems == []


def test_dense_graphs_use_the_cover():
    covered = 0
    for seed in range(30):
        g = random_graph(14, 0.4, [5, seed])
        res = solve_3coloring(g)
        assert (res.coloring is not None) == (brute_force_coloring(g) is not None)
        covered += len(res.stats.covers)
    assert covered >= 20


@pytest.mark.parametrize("seed", range(40))
def test_list_coloring(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(int(rng.integers(1, 9)), 0.45, rng)
    lists = {v: set(rng.choice([1, 2, 3], size=int(rng.integers(1, 4)), replace=False).tolist())
             for v in g.vertices}
    sol = solve_list_coloring(g, lists)
    assert (sol is not None) == (brute_force_coloring(g, lists) is not None)
    if sol is not None:
        assert is_proper_coloring(g, sol, lists)


def test_format_coloring_is_one_indexed():
    assert format_coloring({0: 2, 1: 1}) == "1 2\n2 1\n"
