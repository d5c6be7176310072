"""Continuous-time process and the coupled joint chain.

The continuous chain attaches an exponential clock of rate f(type) to
each vertex; the earliest clock fires and that vertex reproduces onto a
uniform neighbour. We never materialise the n clocks: the minimum of
independent exponentials is exponential with the summed rate, and the
firing vertex is chosen proportionally to its rate, which is exactly the
discrete chain's selection rule. Holding times are drawn by inverse CDF
on an open-interval uniform so log(0) cannot occur.

The coupled chain runs two processes (same graph and type set, fitness
f for the first, f' for the second) on one event stream with three
category kinds per vertex:

  shared   rate min(f(v), f'(v))   both chains reproduce v onto the same w
  first    rate f(v) - f'(v) > 0   only the first chain moves
  second   rate f'(v) - f(v) > 0   only the second chain moves

Under the hypotheses (equal fitness for the focal type; every rival
fitness in f at most every rival fitness in f'; initial focal set of the
second chain inside the first's), the second chain's focal set stays a
subset of the first's at every event. The run asserts exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .rng import ReplicateRng
from .state import State

CASE_SHARED = 0
CASE_FIRST_ONLY = 1
CASE_SECOND_ONLY = 2


class HypothesisViolatedError(ConfigurationError):
    pass


def continuous_step(state: State, rng: ReplicateRng) -> tuple[float, int, int]:
    """Advance one event; returns (holding time, reproducing v, overwritten w).

    The embedded jump chain matches the discrete sampler exactly: v is
    drawn with probability fitness/total via a single integer draw.
    """
    units = state.types.weight_units
    weights = [units[t] for t in state.assignment]
    total_units = state.total_units
    dt = rng.exponential(float(state.total_fitness))
    r = rng.randbelow(total_units)
    acc = 0
    v = state.graph.n - 1
    for i, wt in enumerate(weights):
        acc += wt
        if r < acc:
            v = i
            break
    neighbours = state.graph.adjacency[v]
    w = neighbours[rng.randbelow(len(neighbours))]
    state.apply_in_place(v, w)
    return dt, v, w


@dataclass(frozen=True)
class CoupledEvent:
    index: int
    time: float
    case: int
    v: int
    w: int


@dataclass
class CoupledRunResult:
    violated: bool
    violation_index: int | None
    events_run: int
    settled_at: int | None
    final_first: tuple[int, ...]
    final_second: tuple[int, ...]
    events: list[CoupledEvent] | None


def check_coupling_hypotheses(first: State, second: State, alpha: int) -> None:
    ts, tsp = first.types, second.types
    if first.graph != second.graph:
        raise HypothesisViolatedError("coupled chains must share the graph")
    if ts.names != tsp.names:
        raise HypothesisViolatedError("coupled chains must share the type set")
    if ts.fitness[alpha] != tsp.fitness[alpha]:
        raise HypothesisViolatedError(
            "the focal type must have equal fitness in both chains"
        )
    rivals = [f for j, f in enumerate(ts.fitness) if j != alpha]
    rivals_p = [f for j, f in enumerate(tsp.fitness) if j != alpha]
    if rivals and rivals_p and max(rivals) > min(rivals_p):
        raise HypothesisViolatedError(
            "every rival fitness of the first chain must be at most every"
            " rival fitness of the second"
        )
    for v in range(first.graph.n):
        if second.assignment[v] == alpha and first.assignment[v] != alpha:
            raise HypothesisViolatedError(
                f"initial focal set is not nested (vertex {v})"
            )


def draw_coupled_event(
    first: State, second: State, rng: ReplicateRng, unit_scale: tuple[int, int]
) -> tuple[float, int, int, int]:
    """One joint event from the current pair of states: (dt, case, v, w)."""
    s1, s2 = unit_scale
    u1 = first.types.weight_units
    u2 = second.types.weight_units
    a1 = first.assignment
    a2 = second.assignment
    graph = first.graph
    cases = []
    weights = []
    total = 0
    for v in range(graph.n):
        w1 = u1[a1[v]] * s1
        w2 = u2[a2[v]] * s2
        shared = w1 if w1 < w2 else w2
        cases.append((CASE_SHARED, v))
        weights.append(shared)
        total += shared
        if w1 > w2:
            cases.append((CASE_FIRST_ONLY, v))
            weights.append(w1 - w2)
            total += w1 - w2
        elif w2 > w1:
            cases.append((CASE_SECOND_ONLY, v))
            weights.append(w2 - w1)
            total += w2 - w1
    unit = first.types.weight_unit * s1
    dt = rng.exponential(total / unit)
    r = rng.randbelow(total)
    acc = 0
    case, v = cases[-1]
    for (c, vv), wt in zip(cases, weights):
        acc += wt
        if r < acc:
            case, v = c, vv
            break
    neighbours = graph.adjacency[v]
    w = neighbours[rng.randbelow(len(neighbours))]
    return dt, case, v, w


def coupled_run(
    first: State,
    second: State,
    alpha: int,
    events: int,
    rng: ReplicateRng,
    *,
    record: bool = False,
    settle_short_circuit: bool = True,
) -> CoupledRunResult:
    """Run the joint chain for a fixed number of events.

    Checks the focal-subset invariant after every event and reports the
    first violation, if any. Once both chains are monochromatic no event
    can change either state, so with ``settle_short_circuit`` the run
    stops there; the invariant's value over the skipped tail is
    unchanged by construction.
    """
    check_coupling_hypotheses(first, second, alpha)
    m1 = first.copy()
    m2 = second.copy()
    scale = (
        math.lcm(m1.types.weight_unit, m2.types.weight_unit) // m1.types.weight_unit,
        math.lcm(m1.types.weight_unit, m2.types.weight_unit) // m2.types.weight_unit,
    )
    log: list[CoupledEvent] | None = [] if record else None
    clock = 0.0
    violated = False
    violation_index = None
    settled_at = None
    i = 0
    while i < events:
        dt, case, v, w = draw_coupled_event(m1, m2, rng, scale)
        clock += dt
        if case != CASE_SECOND_ONLY:
            m1.apply_in_place(v, w)
        if case != CASE_FIRST_ONLY:
            m2.apply_in_place(v, w)
        i += 1
        if log is not None:
            log.append(CoupledEvent(i, clock, case, v, w))
        # only the overwritten vertex can break the nesting
        if m2.assignment[w] == alpha and m1.assignment[w] != alpha:
            violated = True
            violation_index = i
            break
        if (
            settle_short_circuit
            and m1.is_absorbed() is not None
            and m2.is_absorbed() is not None
        ):
            settled_at = i
            break
    return CoupledRunResult(
        violated=violated,
        violation_index=violation_index,
        events_run=i,
        settled_at=settled_at,
        final_first=tuple(m1.assignment),
        final_second=tuple(m2.assignment),
        events=log,
    )
