#!/usr/bin/env python3
"""Scaled-down ablation sweep: full solver vs random-init vs no-local-search.

Generates a batch of orchard instances, runs every variant over a seed range,
and prints the per-instance means plus a wins summary. Larger values of
--budget-evals and --runs sharpen the comparison at the cost of runtime.
"""

import argparse
import statistics

from orchard_mtvrp.evolution import SolverConfig, run_aedga
from orchard_mtvrp.instances import OrchardSpec, generate_orchard

VARIANTS = {
    "full": {"init": "ilbim", "use_clsm": True},
    "random-init": {"init": "random", "use_clsm": True},
    "no-clsm": {"init": "ilbim", "use_clsm": False},
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=5)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--side", type=float, default=20.0)
    parser.add_argument("--maturity", type=float, default=0.4)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--budget-evals", type=int, default=600)
    parser.add_argument("--seed", type=int, default=300)
    args = parser.parse_args()

    wins = {name: 0 for name in VARIANTS if name != "full"}
    print(f"{'instance':>10} {'n':>4} " + " ".join(f"{name:>14}" for name in VARIANTS))
    for index in range(args.instances):
        inst = generate_orchard(
            OrchardSpec(
                side_length=args.side,
                tree_count=args.trees,
                maturity_rate=args.maturity,
                seed=args.seed + index,
            )
        )
        means = {}
        for name, flags in VARIANTS.items():
            values = [
                run_aedga(
                    inst,
                    SolverConfig(budget_evals=args.budget_evals, seed=s, **flags),
                ).best_energy
                for s in range(args.runs)
            ]
            means[name] = statistics.fmean(values)
        for name in wins:
            if means["full"] < means[name]:
                wins[name] += 1
        print(
            f"{index + 1:>10} {inst.n:>4} "
            + " ".join(f"{means[name]:>14.1f}" for name in VARIANTS)
        )
    for name, count in wins.items():
        print(f"full beats {name} on {count}/{args.instances} instances")


if __name__ == "__main__":
    main()
