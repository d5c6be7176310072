#!/usr/bin/env python3
"""Stress the coupled-chain subset invariant.

Repeatedly couples a chain against a rival-boosted variant from random
nested starts and counts invariant violations (expected: zero, always).

Example:
    python scripts/coupling_check.py --runs 500 --events 10000 --seed 3
"""

import argparse
import json
from fractions import Fraction

from moranlab.continuous import coupled_run
from moranlab.fitness import TypeSystem
from moranlab.graphs import complete_graph, cycle_graph, path_graph, star_graph
from moranlab.rng import stream
from moranlab.state import State

FAMILIES = {
    "complete": complete_graph,
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
}


def nested_starts(rng, n, k, alpha):
    """Random start pair with the second focal set inside the first's."""
    first = [rng.randbelow(k) for _ in range(n)]
    if alpha not in first:
        first[rng.randbelow(n)] = alpha
    second = []
    for t in first:
        if t == alpha and rng.randbelow(2):
            second.append((alpha + 1) % k)  # drop some focal vertices
        else:
            second.append(t)
    return first, second


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--family", choices=sorted(FAMILIES), default="cycle")
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--runs", type=int, default=500)
    parser.add_argument("--events", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    graph = FAMILIES[args.family](args.n)
    f = TypeSystem(
        names=("a", "b", "c"),
        fitness=(Fraction(2), Fraction(1), Fraction(1)),
        ordinary=1,
    )
    f_boosted = TypeSystem(
        names=("a", "b", "c"),
        fitness=(Fraction(2), Fraction(3, 2), Fraction(3, 2)),
        ordinary=1,
    )
    alpha = 0
    violations = 0
    settled = 0
    for run in range(args.runs):
        rng = stream(args.seed, run)
        a0, b0 = nested_starts(rng, graph.n, f.k, alpha)
        result = coupled_run(
            State.from_assignment(graph, f, a0),
            State.from_assignment(graph, f_boosted, b0),
            alpha,
            args.events,
            rng,
        )
        violations += result.violated
        settled += result.settled_at is not None
    print(
        json.dumps(
            {
                "instance": f"{args.family}({args.n})",
                "runs": args.runs,
                "eventsPerRun": args.events,
                "violations": violations,
                "settledEarly": settled,
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
