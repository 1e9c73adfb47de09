"""Constrained 3-edge-coloring: normalization, splices and the residue.

Run: python3 demos/edge_splicing.py
"""

from trichrome.edgecolor import (EdgeProblem, EdgeStats, neighbor_counts, select_splices,
                                 splice_children, solve_3edge)
from trichrome.generators import random_regular_graph
from trichrome.graphkit import complete_graph, petersen_graph


def main():
    k4 = EdgeProblem.build(complete_graph(4).edges())
    straight, crossed = splice_children(k4, 0)
    print(f"K4: {len(k4.edges)} edges; splicing edge 0 leaves {len(straight.edges)} and "
          f"{len(crossed.edges)} edges in the two children")
    for name, g in (("K4", complete_graph(4)), ("Petersen", petersen_graph()),
                    ("random cubic n=20", random_regular_graph(20, 3, 1))):
        prob = EdgeProblem.build(g.edges())
        m3, m4 = neighbor_counts(prob)
        stats = EdgeStats()
        sol = solve_3edge(g.edges(), stats=stats)
        print(f"{name}: m3={m3} m4={m4} selected splices={len(select_splices(prob))} "
              f"(target m4/3={m4 / 3:.1f}) children={stats.children} "
              f"-> {'colorable' if sol is not None else 'not colorable'}")


if __name__ == "__main__":
    main()
