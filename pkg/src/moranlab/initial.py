"""Initial-state distributions: the canonical single-mutant-per-type
placement ("mut"), explicit finite lists, and black-box oracles.

Samples from a black-box oracle are checked for full type range (every
type present) because the estimator's guarantees assume it; explicit
lists are trusted as written so that point-mass diagnostics on
degenerate states (all-focal, no-focal) remain expressible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ConfigurationError, InputFormatError
from .fitness import TypeSystem, parse_rational
from .graphs import Graph
from .rng import ReplicateRng
from .state import State


class DistributionError(InputFormatError):
    pass


class TooFewVerticesError(ConfigurationError):
    def __init__(self, n: int, k: int):
        super().__init__(
            f"mut initial distribution needs n >= k, got n={n} for k={k} types"
        )


class InvalidOracleStateError(ConfigurationError):
    pass


@dataclass(frozen=True)
class InitialDistribution:
    """kind "mut" | "list" | "oracle".

    list: explicit (probability, assignment) pairs with exact rational
    probabilities summing to 1. oracle: a callable (graph, ts, rng) ->
    assignment sequence.
    """

    kind: str
    entries: tuple[tuple[Fraction, tuple[int, ...]], ...] | None = None
    oracle: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("mut", "list", "oracle"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "list":
            if not self.entries:
                raise DistributionError("explicit list needs at least one state")
            total = sum((p for p, _ in self.entries), Fraction(0))
            if total != 1:
                raise DistributionError(f"probabilities sum to {total}, not 1")
            if any(p < 0 for p, _ in self.entries):
                raise DistributionError("negative probability")
            lengths = {len(a) for _, a in self.entries}
            if len(lengths) != 1:
                raise DistributionError("states have inconsistent vertex counts")
        if self.kind == "oracle" and self.oracle is None:
            raise ValueError("oracle distribution needs a callable")

    @staticmethod
    def mut() -> "InitialDistribution":
        return InitialDistribution(kind="mut")

    @staticmethod
    def from_pairs(pairs) -> "InitialDistribution":
        return InitialDistribution(
            kind="list",
            entries=tuple((Fraction(p), tuple(a)) for p, a in pairs),
        )

    @staticmethod
    def point_mass(assignment) -> "InitialDistribution":
        return InitialDistribution.from_pairs([(Fraction(1), tuple(assignment))])

    @staticmethod
    def from_oracle(fn: Callable) -> "InitialDistribution":
        return InitialDistribution(kind="oracle", oracle=fn)

    @staticmethod
    def from_file(path: str) -> "InitialDistribution":
        """JSON-lines file: {"probability": "p/q", "assignment": [indices]}."""
        pairs = []
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                    prob = parse_rational(doc["probability"])
                    assignment = [int(t) for t in doc["assignment"]]
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                    raise DistributionError(f"{path}:{lineno}: {e}")
                pairs.append((prob, assignment))
        return InitialDistribution.from_pairs(pairs)


def sample_mut(graph: Graph, ts: TypeSystem, rng: ReplicateRng) -> State:
    """Uniform state with exactly one vertex of each non-ordinary type.

    Implemented as a uniform (k-1)-permutation of distinct vertices; the
    remaining vertices are ordinary. Needs n >= k so at least one
    ordinary vertex survives.
    """
    n, k = graph.n, ts.k
    if n < k:
        raise TooFewVerticesError(n, k)
    assignment = [ts.ordinary] * n
    pool = list(range(n))
    limit = n
    for mutant in ts.mutant_types():
        i = rng.randbelow(limit)
        limit -= 1
        v = pool[i]
        pool[i] = pool[limit]
        assignment[v] = mutant
    return State.from_assignment(graph, ts, assignment)


def check_full_range(assignment, ts: TypeSystem) -> None:
    present = set(assignment)
    missing = [ts.names[j] for j in range(ts.k) if j not in present]
    if missing:
        raise InvalidOracleStateError(
            f"sampled state is missing type(s) {missing}; every type must appear"
        )


def sample(
    dist: InitialDistribution, graph: Graph, ts: TypeSystem, rng: ReplicateRng
) -> State:
    """Draw one initial state from the distribution.

    Oracle states are validated: correct vertex count, known type
    indices, and full type range. Explicit lists are validated for shape
    only (they may deliberately put mass on degenerate states).
    """
    if dist.kind == "mut":
        return sample_mut(graph, ts, rng)
    if dist.kind == "list":
        entries = dist.entries
        if len(entries[0][1]) != graph.n:
            raise InvalidOracleStateError(
                f"list states have {len(entries[0][1])} vertices, graph has {graph.n}"
            )
        if len(entries) == 1:
            choice = entries[0][1]
        else:
            unit = math.lcm(*(p.denominator for p, _ in entries))
            weights = [int(p * unit) for p, _ in entries]
            r = rng.randbelow(sum(weights))
            acc = 0
            choice = entries[-1][1]
            for w, (_, a) in zip(weights, entries):
                acc += w
                if r < acc:
                    choice = a
                    break
        return State.from_assignment(graph, ts, choice)
    # oracle
    raw = dist.oracle(graph, ts, rng)
    assignment = list(raw)
    if len(assignment) != graph.n:
        raise InvalidOracleStateError(
            f"oracle returned {len(assignment)} vertices for a {graph.n}-vertex graph"
        )
    if any(not (0 <= t < ts.k) for t in assignment):
        raise InvalidOracleStateError("oracle returned an unknown type index")
    check_full_range(assignment, ts)
    return State.from_assignment(graph, ts, assignment)


def enumerate_mut_states(graph: Graph, ts: TypeSystem):
    """All equally likely mut states as assignment tuples."""
    from itertools import permutations

    n, k = graph.n, ts.k
    if n < k:
        raise TooFewVerticesError(n, k)
    mutants = ts.mutant_types()
    out = []
    for placement in permutations(range(n), k - 1):
        assignment = [ts.ordinary] * n
        for mutant, v in zip(mutants, placement):
            assignment[v] = mutant
        out.append(tuple(assignment))
    return out
