"""Follow one graph through the 3-coloring pipeline.

Peels low-degree vertices, checks for degree-3 structures, builds the bushy
forest and the height-two forest, prints the cover accounting, and solves.

Run: python3 demos/coloring_walkthrough.py [n] [p] [seed]
"""

import sys

from trichrome.generators import random_graph
from trichrome.vertexcolor import (CoverError, accounting, build_height2_forest, find_bushy_forest,
                                   format_coloring, peel_low_degree, reduce_degree3_structures,
                                   solve_3coloring)


def main(n=24, p=0.3, seed=3):
    g = random_graph(n, p, seed)
    print(f"graph: {len(g)} vertices, {g.num_edges()} edges, max degree {g.max_degree()}")

    while True:
        core, _, removed = peel_low_degree(g)
        print(f"peeled {len(removed)} vertices of degree < 3, core has {len(core)}")
        branches = reduce_degree3_structures(core)
        if branches is None:
            break
        print(f"degree-3 structure found: {len(branches)} branches, following the first")
        g = branches[0].graph
    if not len(core):
        print("nothing left for the forest cover")
    else:
        forest = find_bushy_forest(core)
        print(f"bushy forest: {len(forest.trees)} trees, {len(forest.internal)} internal, "
              f"{len(forest.leaves)} leaves")
        try:
            h2 = build_height2_forest(core, forest)
            print(f"height-two forest: {len(h2.trees)} trees, capacities "
                  f"{sorted(t.capacity for t in h2.trees)}")
            acc = accounting(core, forest, h2)
            print(f"accounting p={acc.p} q={acc.q} r={acc.r} s={acc.s} t={acc.t}; "
                  f"predicted per-vertex base {acc.per_vertex_base():.4f}; "
                  f"violations {acc.constraint_violations() or 'none'}")
        except CoverError as exc:
            print(f"no height-two cover: {exc}")

    res = solve_3coloring(random_graph(n, p, seed))
    print()
    print("stats:", res.stats.as_dict())
    if res.coloring is None:
        print("not 3-colorable")
    else:
        print("coloring (vertex color, 1-indexed):")
        print(format_coloring(res.coloring), end="")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(int(args[0]) if args else 24, float(args[1]) if len(args) > 1 else 0.3,
         int(args[2]) if len(args) > 2 else 3)
