"""Closed-form bounds as first-class computations.

Everything here is exact rational arithmetic; callers convert to float
only for presentation. These values also size the estimator's step
budget, where rounding down would silently weaken a guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError
from .fitness import TypeSystem
from .graphs import Graph


class UndefinedBoundError(ConfigurationError):
    pass


class DegenerateRatioError(ConfigurationError):
    pass


@dataclass(frozen=True)
class BoundReport:
    quantity: str
    value: Fraction
    direction: str  # "lower" | "upper"
    inputs: str

    def to_json_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "value": str(self.value),
            "value_float": float(self.value),
            "direction": self.direction,
            "inputs": self.inputs,
        }


def fixation_lower_bound(n: int) -> Fraction:
    """Minimum fixation probability of a fittest type from any admissible start."""
    if n < 1:
        raise UndefinedBoundError("need n >= 1")
    return Fraction(1, n)


def fittest_type_absorption_bound(graph: Graph, ts: TypeSystem, alpha: int) -> Fraction:
    """Expected steps until a fittest type fixates or dies out.

    (|top|-1) n^6 + f(alpha)/(f(alpha)-runner_up) (n+1) n^3, with the
    second term absent when every type shares the top fitness.
    """
    if ts.k < 2:
        raise UndefinedBoundError("absorption bound needs at least two types")
    if alpha not in ts.fittest_types:
        raise ConfigurationError(
            f"type {ts.names[alpha]!r} does not have maximum fitness"
        )
    n = graph.n
    bound = Fraction((len(ts.fittest_types) - 1) * n**6)
    if ts.runner_up_fitness is not None:
        f_a = ts.fitness[alpha]
        bound += f_a / (f_a - ts.runner_up_fitness) * (n + 1) * n**3
    return bound


def absorption_time_bounds(graph: Graph, ts: TypeSystem) -> list[BoundReport]:
    """Total and per-type expected absorption-time bounds.

    With distinct fitness levels f_1 < ... < f_m (multiplicities l_i,
    l = max l_i):
      total:             (l-1) n^6   + sum_{i=2}^m f_i/(f_i - f_{i-1}) (n+1) n^3
      type at level j>1: (l_j-1) n^6 + sum_{i=j}^m ...
      type at level 1:   (l_1-1) n^6 + sum_{i=2}^m ...
    """
    if ts.k < 2:
        raise UndefinedBoundError("absorption bounds need at least two types")
    n = graph.n
    levels = ts.levels
    mult = ts.level_multiplicities
    m = len(levels)
    inputs = f"n={n};{ts.fingerprint()}"

    def tail_sum(j: int) -> Fraction:
        # sum over levels i = j..m-1 (0-based) of f_i / (f_i - f_{i-1})
        acc = Fraction(0)
        for i in range(max(j, 1), m):
            acc += levels[i] / (levels[i] - levels[i - 1])
        return acc * (n + 1) * n**3

    reports = [
        BoundReport(
            quantity="total_absorption_steps",
            value=Fraction((ts.max_multiplicity - 1) * n**6) + tail_sum(1),
            direction="upper",
            inputs=inputs,
        )
    ]
    for t in range(ts.k):
        level = levels.index(ts.fitness[t])
        head = Fraction((mult[level] - 1) * n**6)
        tail = tail_sum(level if level >= 1 else 1)
        reports.append(
            BoundReport(
                quantity=f"absorption_steps[{ts.names[t]}]",
                value=head + tail,
                direction="upper",
                inputs=inputs,
            )
        )
    return reports


def complete_graph_sandwich(
    ts: TypeSystem, alpha: int, n: int, i: int
) -> tuple[Fraction, Fraction]:
    """Fixation-probability bounds on the complete graph from i focal vertices.

    The focal type competes against its strongest rival (lower bound)
    and weakest rival (upper bound); each side is the classic biased
    random-walk hitting probability and needs the fitness ratio != 1.
    """
    if ts.k < 2:
        raise UndefinedBoundError("sandwich needs a competitor type")
    if not (0 <= i <= n):
        raise ConfigurationError(f"need 0 <= i <= n, got i={i}, n={n}")
    f_a = ts.fitness[alpha]
    rivals = [f for j, f in enumerate(ts.fitness) if j != alpha]
    strongest = max(rivals)
    weakest = min(rivals)
    for rival in (strongest, weakest):
        if rival == f_a:
            raise DegenerateRatioError(
                "sandwich requires the focal fitness to differ from both the"
                f" strongest and weakest rival (both are {f_a})"
            )

    def walk(ratio: Fraction) -> Fraction:
        return (1 - ratio**i) / (1 - ratio**n)

    return walk(strongest / f_a), walk(weakest / f_a)
