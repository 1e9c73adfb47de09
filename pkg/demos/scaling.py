"""Empirical branching growth of the CSP solver next to Lambda.

The effective work factor is calls^(1/size).  Desk-scale instances stay far
below the worst-case base; the table is telemetry, not a bound check.

Run: python3 demos/scaling.py
"""

from trichrome.cli import bench


def main():
    print("  n  density  sat/count  median   max      target")
    for density in (4.0, 7.0, 10.0):
        for n in (15, 20, 25, 30):
            f = bench("csp", n, 40, seed=7, density=density, oracle_limit=0)
            print(f"{n:3d}  {density:7.1f}  {f['sat']:3d}/{f['count']:<5d}  "
                  f"{f['effective_work_factor_median']:.4f}  {f['effective_work_factor_max']:.4f}  "
                  f"{f['target_work_factor']:.5f}")


if __name__ == "__main__":
    main()
