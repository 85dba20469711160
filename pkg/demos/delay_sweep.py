"""How the inter-leader delay stretches the time to agreement.

Sweeps the delay over a range of values on the small ring scenario and
fits a straight line through (delay, settling iteration).  Because the
admissible leader step size shrinks roughly like 1/delay, the settling
time grows close to linearly, which the reported R^2 makes visible.
"""

import argparse

from cluster_consensus import preset_small, tau_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--taus", type=int, nargs="+",
                        default=[0, 10, 20, 30, 40, 50],
                        help="inter-leader delays to sweep")
    args = parser.parse_args()

    result = tau_sweep(preset_small(), args.taus)

    print(f"{'tau':>5} {'beta_max':>12} {'admissible':>11} {'iterations':>11}")
    for row in result.rows:
        iters = row["iterations"] if row["converged"] else "capped"
        print(f"{row['tau']:>5} {row['beta_max']:>12.6f} "
              f"{str(row['admissible']):>11} {iters!s:>11}")

    if result.fit is not None:
        print(f"\nlinear fit: iterations ~ {result.fit.slope:.3f} * tau "
              f"+ {result.fit.intercept:.1f}   (R^2 = {result.fit.r_squared:.4f})")


if __name__ == "__main__":
    main()
