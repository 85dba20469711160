"""Intra-cluster delays erode the two-time-scale separation.

Runs the random-geometric scenario with stale reads inside each cluster:
followers mixing on values several steps old still settle, but the local
agreement that normally arrives far sooner than global agreement loses
its head start as the intra-cluster delay grows.  The default is a
desk-scale variant (5 clusters of 20); --full runs the 400-node original,
which takes on the order of a minute.
"""

import argparse
import time

from cluster_consensus import (
    ScenarioSpec,
    build_clustered_network,
    intra_delay_study,
    preset_large,
    run_until,
)


def scaled_variant():
    return ScenarioSpec(
        family="geometric",
        cluster_sizes=(20, 20, 20, 20, 20),
        radius=0.3,
        gamma=0.5,
        beta=0.05,
        tau=20,
        seed=23,
        max_iters=20_000,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tau-intra", type=int, nargs="+", default=[0, 2, 15],
                        help="intra-cluster delays to compare")
    parser.add_argument("--full", action="store_true",
                        help="also run the 400-node scenario once, undelayed")
    args = parser.parse_args()

    result = intra_delay_study(scaled_variant(), args.tau_intra)
    print(f"{'tau_a':>6} {'followers':>10} {'global':>8} {'separation':>11}")
    for row in result.rows:
        if not row["converged"]:
            print(f"{row['tau_intra']:>6} {'capped':>10}")
            continue
        print(f"{row['tau_intra']:>6} {row['follower_iterations']:>10} "
              f"{row['iterations']:>8} {row['separation_ratio']:>10.2f}x")

    if args.full:
        spec = preset_large()
        network = build_clustered_network(spec)
        print(f"\nfull scenario: {network.total_nodes} nodes, "
              f"inter-leader delay {spec.tau}")
        start = time.perf_counter()
        outcome = run_until(network, spec)
        elapsed = time.perf_counter() - start
        print(f"settled at k = {outcome.iterations} "
              f"({elapsed:.1f} s wall time)")


if __name__ == "__main__":
    main()
