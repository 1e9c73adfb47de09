"""Reproduce the running-time constants from the work-factor calculus.

Run: python3 demos/constants.py
"""

from trichrome import cspsolver
from trichrome.workfactor import EPSILON, LAMBDA, optimize_epsilon, paper_constants, work_factor


def main():
    eps, lam = optimize_epsilon()
    print(f"balancing epsilon        {eps:.6f}")
    print(f"Lambda = lambda(4,4,5,5) {LAMBDA:.6f}  (max branching factor at that epsilon: {lam:.6f})")
    print()
    print("rule  claimed decrements            work factor")
    for rule in cspsolver.RULES:
        decs = ", ".join(f"{d:.3f}" for d in cspsolver.claimed_decrements(rule, EPSILON))
        print(f"{rule:<5} {decs:<30} {cspsolver.claimed_work_factor(rule, EPSILON):.5f}")
    print()
    consts = paper_constants()
    print(f"(4,2)-CSP per variable   {consts['restrict4_base']:.5f}")
    print(f"3-coloring per vertex    {consts['vertex_coloring_base']:.5f}")
    print(f"3-edge-coloring per edge {consts['edge_coloring_base']:.5f}")
    print()
    print("d   (d,2)-CSP base")
    for d in range(3, 9):
        print(f"{d}   {consts[f'dcsp_{d}']:.4f}")
    print()
    print(f"lambda(3,4,4) = {work_factor([3, 4, 4]):.5f}")


if __name__ == "__main__":
    main()
