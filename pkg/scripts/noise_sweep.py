#!/usr/bin/env python3
"""Sweep the noise level and compare query policies.

For each epsilon in the sweep, runs every policy on fresh random graphs
and records success rate and mean query count to a CSV.
"""

import argparse
import csv
import sys
from pathlib import Path

from graphbisect.harness import POLICIES, ExperimentSpec, run_experiment, summarize


def main():
    parser = argparse.ArgumentParser(description="Success rate and query cost vs noise level.")
    parser.add_argument("--graph", default="erdos-renyi-connected")
    parser.add_argument("--n", type=int, default=64)
    parser.add_argument("--epsilons", default="0.05,0.1,0.2,0.3,0.4,0.5",
                        help="Comma-separated epsilon values.")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="noise_sweep.csv")
    args = parser.parse_args()

    epsilons = [float(tok) for tok in args.epsilons.split(",")]
    out = Path(args.out)

    with open(out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["epsilon", "policy", "trials", "successes", "errors", "mean_queries"])
        for eps in epsilons:
            spec = ExperimentSpec(
                graph=args.graph,
                n=args.n,
                epsilon=eps,
                trials=args.trials,
                seed=args.seed,
                timing=False,
            )
            rows = list(run_experiment(spec))
            stats = summarize(rows)
            for policy in POLICIES:
                s = stats[policy]
                writer.writerow([eps, policy, s["runs"], s["successes"],
                                 s["errors"], "%.1f" % s["mean_queries"]])
                print(f"eps={eps:.2f} {policy}: {s['successes']}/{s['runs']} "
                      f"mean queries {s['mean_queries']:.1f}", file=sys.stderr)

    print(f"wrote {out}")


if __name__ == "__main__":
    main()
