"""Discrete-time Moran transition sampler and run-to-absorption driver.

One step: a vertex v is drawn with probability proportional to the
integer weight of its current type (exactly fitness/total), a neighbour
w is drawn uniformly, and w takes v's type. Same-type reproductions are
simulated like any other step; the step counter includes them.

Vertex selection runs on a Fenwick (binary indexed) tree over integer
weights: O(log n) per draw and per weight update, and the single
integer draw in [0, total) keeps the distribution exact.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import Graph
from .fitness import TypeSystem
from .rng import ReplicateRng
from .state import AbsorptionRecord, AbsorbedStateError, State


class StepSampler:
    """Fenwick tree over per-vertex integer weights."""

    __slots__ = ("n", "tree", "total", "_highbit")

    def __init__(self, weights):
        weights = list(weights)
        n = len(weights)
        self.n = n
        tree = [0] * (n + 1)
        for i, w in enumerate(weights, start=1):
            tree[i] += w
            parent = i + (i & -i)
            if parent <= n:
                tree[parent] += tree[i]
        self.tree = tree
        self.total = sum(weights)
        self._highbit = 1 << (n.bit_length() - 1) if n else 0

    @classmethod
    def for_state(cls, state: State) -> "StepSampler":
        units = state.types.weight_units
        return cls(units[t] for t in state.assignment)

    def weight(self, i: int) -> int:
        """Current weight of index i (sum of tree deltas)."""
        w = 0
        j = i + 1
        k = i
        while j > 0:
            w += self.tree[j]
            j -= j & -j
        while k > 0:
            w -= self.tree[k]
            k -= k & -k
        return w

    def add(self, i: int, delta: int) -> None:
        self.total += delta
        j = i + 1
        tree = self.tree
        n = self.n
        while j <= n:
            tree[j] += delta
            j += j & -j

    def find(self, r: int) -> int:
        """Index i with prefix_sum(i) <= r < prefix_sum(i+1); needs 0 <= r < total."""
        idx = 0
        bit = self._highbit
        tree = self.tree
        n = self.n
        while bit:
            nxt = idx + bit
            if nxt <= n and tree[nxt] <= r:
                r -= tree[nxt]
                idx = nxt
            bit >>= 1
        return idx


def step(
    state: State, sampler: StepSampler, rng: ReplicateRng
) -> tuple[State, int, int]:
    """One transition; returns (state, reproducing vertex, overwritten vertex).

    The state is updated in place and returned for convenience; the
    sampler's weight for the overwritten vertex is kept in sync.
    """
    adjacency = state.graph.adjacency
    v = sampler.find(rng.randbelow(sampler.total))
    neighbours = adjacency[v]
    w = neighbours[rng.randbelow(len(neighbours))]
    tv = state.assignment[v]
    tw = state.assignment[w]
    if tv != tw:
        state.apply_in_place(v, w)
        units = state.types.weight_units
        sampler.add(w, units[tv] - units[tw])
    return state, v, w


def run_to_absorption(
    initial: State,
    budget: int | None,
    rng: ReplicateRng,
    *,
    mode: str = "full",
    alpha: int | None = None,
    seed_key: tuple[int, ...] = (),
    record: list | None = None,
) -> AbsorptionRecord:
    """Drive the chain until its stopping predicate holds or the budget runs out.

    mode "full" stops at fixation of any type; mode "alpha" stops as
    soon as the focal type either covers the graph or dies out. A
    ``budget`` of None means unbounded (absorption is certain on a
    connected graph). The initial state is copied, not consumed.
    """
    if mode not in ("full", "alpha"):
        raise ValueError(f"mode must be 'full' or 'alpha', got {mode!r}")
    if mode == "alpha" and alpha is None:
        raise ValueError("alpha-stopped mode needs the focal type")
    state = initial.copy()
    n = state.graph.n
    counts = state.counts

    def stopped() -> AbsorptionRecord | None:
        if mode == "alpha":
            if counts[alpha] == n:
                return AbsorptionRecord("fixated", alpha, steps, seed_key)
            if counts[alpha] == 0:
                return AbsorptionRecord("extinct", None, steps, seed_key)
            return None
        full = state.is_absorbed()
        if full is not None:
            return AbsorptionRecord("fixated", full, steps, seed_key)
        return None

    steps = 0
    result = stopped()
    if result is not None:
        return result

    sampler = StepSampler.for_state(state)
    adjacency = state.graph.adjacency
    assignment = state.assignment
    units = state.types.weight_units
    randbelow = rng.randbelow
    find = sampler.find
    while budget is None or steps < budget:
        v = find(randbelow(sampler.total))
        neighbours = adjacency[v]
        w = neighbours[randbelow(len(neighbours))]
        tv = assignment[v]
        tw = assignment[w]
        if tv != tw:
            assignment[w] = tv
            counts[tw] -= 1
            counts[tv] += 1
            state.total_units += units[tv] - units[tw]
            sampler.add(w, units[tv] - units[tw])
        steps += 1
        if record is not None:
            record.append((steps, v, w, tuple(counts)))
        if tv != tw:
            if mode == "alpha":
                if counts[alpha] == n:
                    state.validate()
                    return AbsorptionRecord("fixated", alpha, steps, seed_key)
                if counts[alpha] == 0:
                    state.validate()
                    return AbsorptionRecord("extinct", None, steps, seed_key)
            elif counts[tv] == n:
                state.validate()
                return AbsorptionRecord("fixated", tv, steps, seed_key)
    state.validate()
    return AbsorptionRecord("truncated", None, steps, seed_key)


def enumerate_transitions(state: State) -> dict[tuple[int, ...], Fraction]:
    """Exact one-step kernel row: next assignment -> probability."""
    graph = state.graph
    fitness = state.types.fitness
    total = state.total_fitness
    out: dict[tuple[int, ...], Fraction] = {}
    base = tuple(state.assignment)
    for v in range(graph.n):
        pv = fitness[base[v]] / total
        deg = graph.degrees[v]
        for w in graph.adjacency[v]:
            nxt = base if base[w] == base[v] else (
                base[:w] + (base[v],) + base[w + 1:]
            )
            p = pv * Fraction(1, deg)
            out[nxt] = out.get(nxt, Fraction(0)) + p
    return out


def one_step_drift(state: State, alpha: int) -> Fraction:
    """Exact expected one-step change of the focal type's potential.

    Enumerates every (v, w) transition: the potential moves by +1/d(w)
    when a focal vertex overwrites a non-focal neighbour and by -1/d(w)
    in the reverse direction. Undefined on absorbed-for-alpha states.
    """
    counts = state.counts
    n = state.graph.n
    if counts[alpha] == 0 or counts[alpha] == n:
        raise AbsorbedStateError(
            "drift is only defined while the focal type is neither extinct nor fixed"
        )
    graph = state.graph
    fitness = state.types.fitness
    total = state.total_fitness
    assignment = state.assignment
    drift = Fraction(0)
    for v in range(n):
        pv = fitness[assignment[v]] / total
        deg = graph.degrees[v]
        v_focal = assignment[v] == alpha
        for w in graph.adjacency[v]:
            w_focal = assignment[w] == alpha
            if v_focal == w_focal:
                continue
            change = Fraction(1 if v_focal else -1, graph.degrees[w])
            drift += pv * Fraction(1, deg) * change
    return drift


def drift_floor(graph: Graph, ts: TypeSystem) -> Fraction:
    """The guaranteed per-step drift (1 - runner_up/max) / n^3.

    Meaningful when the fittest type is unique; positive then.
    """
    if ts.runner_up_fitness is None:
        return Fraction(0)
    return (1 - ts.runner_up_fitness / ts.max_fitness) / graph.n**3
