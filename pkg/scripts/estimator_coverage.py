#!/usr/bin/env python3
"""Coverage experiment: how often does the estimator land in its window?

Runs independent meta-trials of the full scheme on a small instance,
compares each estimate to the exact fixation probability, and reports
the fraction inside (1 +- eps) together with truncation accounting.

Example:
    python scripts/estimator_coverage.py --family complete --n 3 \
        --eps 0.2 --delta 0.2 --trials 50 --seed 1000
"""

import argparse
import json
from fractions import Fraction

from moranlab.estimator import EstimatorConfig, estimate_fixation_probability
from moranlab.exact import distribution_average, solve
from moranlab.fitness import TypeSystem
from moranlab.graphs import complete_graph, cycle_graph, path_graph, star_graph
from moranlab.initial import InitialDistribution

FAMILIES = {
    "complete": complete_graph,
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--family", choices=sorted(FAMILIES), default="complete")
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--r", default="2", help="mutant fitness (exact rational)")
    parser.add_argument("--eps", type=float, default=0.2)
    parser.add_argument("--delta", type=float, default=0.2)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=1000)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    graph = FAMILIES[args.family](args.n)
    ts = TypeSystem(
        names=("o", "m"), fitness=(Fraction(1), Fraction(args.r)), ordinary=0
    )
    mut = InitialDistribution.mut()
    exact_value = distribution_average(solve(graph, ts), mut)[1]
    lo = (1 - Fraction(args.eps).limit_denominator(1000)) * exact_value
    hi = (1 + Fraction(args.eps).limit_denominator(1000)) * exact_value

    hits = 0
    truncated_repeats = 0
    total_repeats = 0
    total_steps = 0
    for trial in range(args.trials):
        config = EstimatorConfig(
            eps=args.eps,
            delta=args.delta,
            master_seed=args.seed + trial,
            threads=args.threads,
        )
        est = estimate_fixation_probability(graph, ts, 1, mut, config)
        hits += lo <= est.value <= hi
        truncated_repeats += sum(est.repeat_truncated)
        total_repeats += est.repeats
        total_steps += est.total_steps

    print(
        json.dumps(
            {
                "instance": f"{args.family}({args.n}), r={args.r}",
                "exact": str(exact_value),
                "trials": args.trials,
                "inWindow": hits,
                "coverage": hits / args.trials,
                "guarantee": 1 - args.delta,
                "truncatedRepeats": truncated_repeats,
                "totalRepeats": total_repeats,
                "totalSteps": total_steps,
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
