import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from moranlab.bounds import absorption_time_bounds
from moranlab.fitness import TypeSystem
from moranlab.graphs import (
    complete_graph,
    cycle_graph,
    enumerate_connected_graphs,
    from_edges,
    path_graph,
    star_graph,
)
from moranlab.process import (
    StepSampler,
    drift_floor,
    enumerate_transitions,
    one_step_drift,
    run_to_absorption,
    step,
)
from moranlab.rng import stream
from moranlab.state import AbsorbedStateError, State

TS2 = TypeSystem(names=("o", "m"), fitness=(Fraction(1), Fraction(2)), ordinary=0)


# ---------------------------------------------------------------- sampler


@given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=40))
@settings(max_examples=200)
def test_fenwick_find_matches_linear_scan(weights):
    total = sum(weights)
    if total == 0:
        weights[0] = 1
        total = 1
    sampler = StepSampler(weights)
    assert sampler.total == total
    for r in range(total):
        acc = 0
        expected = None
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                expected = i
                break
        assert sampler.find(r) == expected


@given(
    st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=20),
    st.lists(
        st.tuples(st.integers(0, 19), st.integers(-5, 20)), max_size=15
    ),
)
@settings(max_examples=150)
def test_fenwick_updates(weights, updates):
    sampler = StepSampler(weights)
    current = list(weights)
    for i, delta in updates:
        i %= len(current)
        if current[i] + delta < 0:
            continue
        current[i] += delta
        sampler.add(i, delta)
    assert sampler.total == sum(current)
    for i, w in enumerate(current):
        assert sampler.weight(i) == w


# ---------------------------------------------------------------- one step


def _hand_kernel(state):
    """Independent transition enumeration: loop (v, w) with plain Fractions."""
    g, ts = state.graph, state.types
    total = sum((ts.fitness[t] for t in state.assignment), Fraction(0))
    kernel = {}
    for v in range(g.n):
        for w in g.adjacency[v]:
            p = ts.fitness[state.assignment[v]] / total / g.degrees[v]
            nxt = list(state.assignment)
            nxt[w] = nxt[v]
            key = tuple(nxt)
            kernel[key] = kernel.get(key, Fraction(0)) + p
    return kernel


def test_p3_one_step_kernel():
    s = State.from_assignment(path_graph(3), TS2, [1, 0, 0])
    kernel = enumerate_transitions(s)
    assert kernel == _hand_kernel(s)
    assert kernel[(1, 1, 0)] == Fraction(1, 2)
    assert kernel[(0, 0, 0)] == Fraction(1, 8)
    assert kernel[(1, 0, 0)] == Fraction(3, 8)
    assert sum(kernel.values()) == 1


def test_kernel_rows_are_stochastic_on_random_states():
    g = star_graph(5)
    ts = TypeSystem(
        names=("a", "b", "c"),
        fitness=(Fraction(1), Fraction(3, 2), Fraction(2)),
        ordinary=0,
    )
    rng = stream(3)
    for _ in range(20):
        assignment = [rng.randbelow(3) for _ in range(5)]
        s = State.from_assignment(g, ts, assignment)
        kernel = enumerate_transitions(s)
        assert sum(kernel.values()) == 1
        assert kernel == _hand_kernel(s)


def test_k2_selection_probabilities():
    g = complete_graph(2)
    s = State.from_assignment(g, TS2, [1, 0])
    kernel = enumerate_transitions(s)
    # the fitter vertex reproduces w.p. 2/3 and fixates; the other w.p. 1/3
    assert kernel[(1, 1)] == Fraction(2, 3)
    assert kernel[(0, 0)] == Fraction(1, 3)


def test_step_on_monochromatic_state_never_changes_counts():
    s = State.from_assignment(complete_graph(3), TS2, [1, 1, 1])
    sampler = StepSampler.for_state(s)
    rng = stream(14)
    for _ in range(100):
        step(s, sampler, rng)
        assert s.counts == [0, 3]


def _revert(state, sampler, w, old_type):
    new_type = state.assignment[w]
    if new_type == old_type:
        return
    units = state.types.weight_units
    state.assignment[w] = old_type
    state.counts[new_type] -= 1
    state.counts[old_type] += 1
    state.total_units += units[old_type] - units[new_type]
    sampler.add(w, units[old_type] - units[new_type])


@pytest.mark.parametrize(
    "graph,assignment",
    [
        (complete_graph(3), [1, 0, 0]),
        (path_graph(4), [1, 0, 1, 0]),
    ],
)
def test_empirical_step_distribution_matches_kernel(graph, assignment):
    """10^6 sampled transitions against the exact kernel, 4 sigma per outcome."""
    s = State.from_assignment(graph, TS2, assignment)
    kernel = enumerate_transitions(s)
    sampler = StepSampler.for_state(s)
    rng = stream(12345)
    draws = 1_000_000
    counts: dict = {}
    for _ in range(draws):
        before = s.assignment[:]
        _, v, w = step(s, sampler, rng)
        key = tuple(s.assignment)
        counts[key] = counts.get(key, 0) + 1
        _revert(s, sampler, w, before[w])
        assert s.assignment == before
    assert set(counts) <= set(kernel)
    for key, p in kernel.items():
        p = float(p)
        sigma = math.sqrt(p * (1 - p) / draws)
        assert abs(counts.get(key, 0) / draws - p) < 4 * sigma, key


# ------------------------------------------------------- run to absorption


def test_already_fixated_returns_zero_steps():
    s = State.from_assignment(complete_graph(3), TS2, [1, 1, 1])
    rec = run_to_absorption(s, 1000, stream(0), mode="alpha", alpha=1)
    assert rec.outcome == "fixated" and rec.type_index == 1 and rec.steps == 0
    rec = run_to_absorption(s, None, stream(0), mode="full")
    assert rec.outcome == "fixated" and rec.steps == 0


def test_zero_budget_truncates():
    s = State.from_assignment(complete_graph(3), TS2, [1, 0, 0])
    rec = run_to_absorption(s, 0, stream(0), mode="full")
    assert rec.outcome == "truncated" and rec.steps == 0


def test_alpha_mode_reports_extinction():
    s = State.from_assignment(path_graph(3), TS2, [1, 0, 0])
    extinct = 0
    for i in range(200):
        rec = run_to_absorption(s, None, stream(9, i), mode="alpha", alpha=1)
        assert rec.outcome in ("fixated", "extinct")
        extinct += rec.outcome == "extinct"
    assert extinct > 0


def test_k3_fixation_frequency_matches_closed_form():
    """Single fit mutant on the triangle fixates w.p. (1-1/2)/(1-1/8) = 4/7."""
    g = complete_graph(3)
    s = State.from_assignment(g, TS2, [1, 0, 0])
    replicates = 100_000
    wins = 0
    for i in range(replicates):
        rec = run_to_absorption(s, None, stream(777, i), mode="alpha", alpha=1)
        wins += rec.outcome == "fixated"
    p = 4.0 / 7.0
    sigma = math.sqrt(p * (1 - p) / replicates)
    assert abs(wins / replicates - p) < 3 * sigma


def test_trajectory_recording():
    s = State.from_assignment(path_graph(3), TS2, [1, 0, 0])
    log = []
    rec = run_to_absorption(s, None, stream(4), mode="full", record=log)
    assert len(log) == rec.steps
    steps, vs, ws, counts = zip(*log)
    assert list(steps) == list(range(1, rec.steps + 1))
    assert sum(counts[-1]) == 3


# ------------------------------------------------------------------ drift


def test_drift_examples():
    s = State.from_assignment(complete_graph(2), TS2, [1, 0])
    assert one_step_drift(s, 1) == Fraction(1, 3)
    s = State.from_assignment(path_graph(3), TS2, [1, 0, 0])
    assert one_step_drift(s, 1) == Fraction(1, 8)


def test_drift_requires_mixed_state():
    s = State.from_assignment(path_graph(3), TS2, [1, 1, 1])
    with pytest.raises(AbsorbedStateError):
        one_step_drift(s, 1)


def test_drift_positive_when_uniquely_fittest():
    g = cycle_graph(5)
    rng = stream(21)
    for _ in range(50):
        assignment = [rng.randbelow(2) for _ in range(5)]
        if len(set(assignment)) < 2:
            continue
        s = State.from_assignment(g, TS2, assignment)
        assert one_step_drift(s, 1) > 0


def test_drift_exceeds_floor_exhaustively_small():
    """Every mixed 2-type state on every connected graph with n <= 4."""
    for n in (2, 3, 4):
        floor_seen = []
        for g in enumerate_connected_graphs(n):
            floor = drift_floor(g, TS2)
            assert floor == Fraction(1, 2) / n**3
            for mask in range(1, 2**n - 1):
                assignment = [(mask >> v) & 1 for v in range(n)]
                s = State.from_assignment(g, TS2, assignment)
                drift = one_step_drift(s, 1)
                assert drift > floor
                floor_seen.append(drift - floor)
        assert all(x > 0 for x in floor_seen)


def test_drift_exceeds_floor_sampled_n6():
    """Spot check on sampled connected 6-vertex graphs and states, k=3."""
    ts3 = TypeSystem(
        names=("a", "b", "c"),
        fitness=(Fraction(1), Fraction(3, 2), Fraction(2)),
        ordinary=0,
    )
    rng = stream(99)
    checked = 0
    while checked < 40:
        edges = {(i, i + 1) for i in range(5)}
        for _ in range(rng.randbelow(8)):
            u, v = rng.randbelow(6), rng.randbelow(6)
            if u != v:
                edges.add((min(u, v), max(u, v)))
        g = from_edges(6, edges)
        assignment = [rng.randbelow(3) for _ in range(6)]
        if 0 < assignment.count(2) < 6:
            s = State.from_assignment(g, ts3, assignment)
            assert one_step_drift(s, 2) > drift_floor(g, ts3)
            checked += 1


# ------------------------------------------------------------- absorption


def _total_bound(graph, ts):
    return next(
        r.value
        for r in absorption_time_bounds(graph, ts)
        if r.quantity == "total_absorption_steps"
    )


@pytest.mark.parametrize(
    "graph", [complete_graph(4), path_graph(4), star_graph(5), cycle_graph(5)]
)
def test_absorption_certain_within_100x_bound(graph):
    budget = 100 * math.ceil(_total_bound(graph, TS2))
    for i in range(300):
        s = State.from_assignment(
            graph, TS2, [1 if v == i % graph.n else 0 for v in range(graph.n)]
        )
        rec = run_to_absorption(s, budget, stream(31, i), mode="full")
        assert rec.outcome == "fixated"


def test_mean_full_fixation_steps_below_bound():
    g = complete_graph(4)
    bound = float(_total_bound(g, TS2))
    steps = []
    for i in range(2000):
        s = State.from_assignment(g, TS2, [1, 0, 0, 0])
        rec = run_to_absorption(s, None, stream(55, i), mode="full")
        steps.append(rec.steps)
    mean = sum(steps) / len(steps)
    sd = math.sqrt(sum((x - mean) ** 2 for x in steps) / (len(steps) - 1))
    upper99 = mean + 2.326 * sd / math.sqrt(len(steps))
    assert upper99 <= bound
