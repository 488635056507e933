#!/usr/bin/env python3
"""Framework sweep over the six makespan scenarios (robots x threshold).

For each instance the route-generation mean energy Z sets the two bounds
1.5 Z / m and 1.7 Z / m; every framework then solves under each bound and
the per-scenario Friedman mean ranks are reported (rank 1 = best, infeasible
runs rank last).
"""

import argparse
import math
import statistics

from orchard_mtvrp.evolution import SolverConfig, run_aedga
from orchard_mtvrp.instances import OrchardSpec, generate_orchard
from orchard_mtvrp.scheduler import Framework, thresholds
from orchard_mtvrp.stats import friedman


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=5)
    parser.add_argument("--trees", type=int, default=20)
    parser.add_argument("--side", type=float, default=15.0)
    parser.add_argument("--maturity", type=float, default=0.8)
    parser.add_argument("--capacity", type=float, default=150.0)
    parser.add_argument("--robots", type=int, nargs="+", default=[2, 5, 8])
    parser.add_argument("--budget-evals", type=int, default=400)
    parser.add_argument("--base-runs", type=int, default=3)
    parser.add_argument("--seed", type=int, default=700)
    args = parser.parse_args()

    instances = [
        generate_orchard(
            OrchardSpec(
                side_length=args.side,
                tree_count=args.trees,
                maturity_rate=args.maturity,
                capacity=args.capacity,
                seed=args.seed + i,
            )
        )
        for i in range(args.instances)
    ]
    z_mean = [
        statistics.fmean(
            run_aedga(inst, SolverConfig(budget_evals=args.budget_evals, seed=s)).best_energy
            for s in range(args.base_runs)
        )
        for inst in instances
    ]

    frameworks = list(Framework)
    print(f"{'scenario':>12} " + " ".join(f"{fw.value:>6}" for fw in frameworks))
    for m in args.robots:
        for bound_index, label in ((0, "TH1"), (1, "TH2")):
            matrix = []
            for inst, z in zip(instances, z_mean):
                bound = thresholds(z, m)[bound_index]
                row = []
                for fw in frameworks:
                    result = run_aedga(
                        inst,
                        SolverConfig(
                            budget_evals=args.budget_evals,
                            seed=args.seed,
                            robots=m,
                            energy_bound=bound,
                            framework=fw,
                        ),
                    )
                    row.append(result.best_energy if result.status == "ok" else math.inf)
                matrix.append(row)
            ranks = friedman(matrix).mean_ranks
            print(f"{f'm={m} {label}':>12} " + " ".join(f"{r:>6.2f}" for r in ranks))


if __name__ == "__main__":
    main()
