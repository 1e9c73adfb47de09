"""Solve 3-SAT through the clause-selection CSP.

Shows that the CSP has one variable per 3-clause no matter how many
variables and 2-clauses the formula has.

Run: python3 demos/sat_via_csp.py
"""

from trichrome.generators import random_3cnf
from trichrome.satfront import brute_force_sat, solve_3sat, translate_3sat


def main():
    print(" vars  2-clauses  t   CSP vars  constraints  verdict  calls")
    for n, t, two in ((6, 10, 0), (6, 10, 8), (30, 10, 12), (60, 16, 20), (200, 18, 40)):
        f = random_3cnf(n, t, seed=[n, t], two_clauses=two)
        inst = translate_3sat(f)
        res = solve_3sat(f)
        verdict = "SAT" if res.model is not None else "UNSAT"
        calls = res.stats.calls if res.stats else 0
        print(f"{n:5d}  {two:9d}  {t:2d}  {len(inst.variables):8d}  {inst.num_constraints():11d}"
              f"  {verdict:7s}  {calls:5d}")
        if n <= 20:
            assert (brute_force_sat(f) is not None) == (res.model is not None)


if __name__ == "__main__":
    main()
