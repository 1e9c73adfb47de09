"""Reproducible random instances.

Every generator takes a seed (or a numpy Generator) and is deterministic
for a fixed seed.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .cspcore import CspInstance, build_instance
from .graphkit import Graph
from .satfront import CnfFormula


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_csp(n: int, density: float, seed=None, four_color_fraction: float = 0.0,
               colors: int = 3) -> CspInstance:
    """Random (3,2)/(4,2)-CSP with ``round(density * n)`` distinct constraints.

    Each variable gets ``colors`` colors, or four with probability
    ``four_color_fraction``.  Constraints are drawn uniformly among all
    pairs of (variable, color) pairs on distinct variables.
    """
    if n < 0 or density < 0 or not 0 <= four_color_fraction <= 1 or colors < 1:
        raise ValueError("invalid parameters for random_csp")
    rng = _rng(seed)
    doms = {}
    for v in range(1, n + 1):
        k = 4 if rng.random() < four_color_fraction else colors
        doms[v] = list(range(1, k + 1))
    pairs = [(v, c) for v in doms for c in doms[v]]
    candidates = [(p, q) for p, q in combinations(pairs, 2) if p[0] != q[0]]
    m = min(int(round(density * n)), len(candidates))
    picks = rng.choice(len(candidates), size=m, replace=False) if m else []
    return build_instance(doms, [candidates[i] for i in sorted(picks)])


def random_dcsp(n: int, d: int, density: float, seed=None) -> CspInstance:
    """Random (d,2)-CSP with d colors per variable."""
    return random_csp(n, density, seed, colors=d)


def degree_targeted_csp(n: int, degrees: Sequence[int], seed=None,
                        four_color_fraction: float = 0.0, four_color_degree: int | None = None,
                        colors: int = 3) -> CspInstance:
    """Random CSP whose pairs aim for constraint counts drawn from ``degrees``.

    Partners are picked at random among pairs on other variables, never
    putting two neighbors of one pair on the same variable; stubs that find
    no valid partner are dropped, so degrees can fall short of the target.
    ``four_color_degree`` overrides the target for pairs of four-color variables.
    """
    rng = _rng(seed)
    doms = {}
    for v in range(1, n + 1):
        k = 4 if rng.random() < four_color_fraction else colors
        doms[v] = list(range(1, k + 1))
    pairs = [(v, c) for v in doms for c in doms[v]]
    want = {}
    for p in pairs:
        if four_color_degree is not None and len(doms[p[0]]) == 4:
            want[p] = four_color_degree
        else:
            want[p] = int(degrees[rng.integers(len(degrees))])
    nbrs: dict = {p: set() for p in pairs}
    for i in rng.permutation(len(pairs)):
        p = pairs[i]
        while len(nbrs[p]) < want[p]:
            taken = {w for w, _ in nbrs[p]}
            options = [q for q in pairs if q[0] != p[0] and q[0] not in taken
                       and len(nbrs[q]) < want[q] and p[0] not in {w for w, _ in nbrs[q]}]
            if not options:
                break
            q = options[rng.integers(len(options))]
            nbrs[p].add(q)
            nbrs[q].add(p)
    cons = {tuple(sorted((p, q))) for p in pairs for q in nbrs[p]}
    return build_instance(doms, sorted(cons))


def pair_regular_csp(n: int, degree: int, seed=None, colors: int = 3) -> CspInstance:
    """Every pair aims for exactly ``degree`` constraints on distinct variables."""
    return degree_targeted_csp(n, [degree], seed, colors=colors)


def random_graph(n: int, p: float, seed=None) -> Graph:
    rng = _rng(seed)
    g = Graph(range(n))
    for u, v in combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(u, v)
    return g


def random_regular_graph(n: int, k: int, seed=None, tries: int = 1000) -> Graph:
    """Random k-regular simple graph by sequential stub pairing with restarts.

    Each step joins two random stubs whose vertices are distinct and not yet
    adjacent; a run that gets stuck starts over.
    """
    if n * k % 2 or k >= n:
        raise ValueError("no k-regular simple graph with these parameters")
    rng = _rng(seed)
    for _ in range(tries):
        spare = np.full(n, k)
        g = Graph(range(n))
        while spare.any():
            open_vs = np.flatnonzero(spare)
            u = int(rng.choice(open_vs, p=spare[open_vs] / spare[open_vs].sum()))
            cands = np.array([v for v in open_vs if v != u and not g.has_edge(u, int(v))], dtype=int)
            if not len(cands):
                break
            v = int(rng.choice(cands, p=spare[cands] / spare[cands].sum()))
            g.add_edge(u, v)
            spare[u] -= 1
            spare[v] -= 1
        else:
            return g
    raise RuntimeError("failed to sample a regular graph")


def random_subcubic_graph(n: int, p: float, seed=None) -> Graph:
    """Random graph with maximum degree three: edges offered in random order,
    kept while both endpoints have spare degree and with probability p."""
    rng = _rng(seed)
    g = Graph(range(n))
    pairs = list(combinations(range(n), 2))
    for i in rng.permutation(len(pairs)):
        u, v = pairs[i]
        if g.degree(u) < 3 and g.degree(v) < 3 and rng.random() < p:
            g.add_edge(u, v)
    return g


def random_3cnf(n: int, t: int, seed=None, two_clauses: int = 0, unit_clauses: int = 0) -> CnfFormula:
    """Formula with ``t`` 3-clauses over distinct variables plus optional short clauses."""
    if n < 3 and t > 0:
        raise ValueError("3-clauses need at least three variables")
    rng = _rng(seed)
    clauses = []
    for size, count in ((3, t), (2, two_clauses), (1, unit_clauses)):
        for _ in range(count):
            vs = rng.choice(np.arange(1, n + 1), size=size, replace=False)
            signs = rng.choice([-1, 1], size=size)
            clauses.append(tuple(int(s * v) for s, v in zip(signs, vs)))
    return CnfFormula(n, clauses)
