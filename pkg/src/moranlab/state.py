"""Process states: type assignment, occupancy counts, total fitness.

Counts and total fitness are maintained incrementally (O(1) per
reproduction) because the engine touches them every step; ``validate``
recomputes everything from scratch so tests can guard against drift.
The total is tracked as an integer in shared-denominator units, which
keeps the per-step update to plain int arithmetic while staying exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigurationError
from .fitness import TypeSystem
from .graphs import Graph


class NotNeighboursError(ConfigurationError):
    def __init__(self, v: int, w: int):
        super().__init__(f"vertices {v} and {w} are not adjacent")


class AbsorbedStateError(ConfigurationError):
    pass


@dataclass
class State:
    graph: Graph
    types: TypeSystem
    assignment: list[int]
    counts: list[int]
    total_units: int

    @classmethod
    def from_assignment(cls, graph: Graph, types: TypeSystem, assignment) -> "State":
        assignment = list(assignment)
        if len(assignment) != graph.n:
            raise ConfigurationError(
                f"assignment has {len(assignment)} entries for {graph.n} vertices"
            )
        counts = [0] * types.k
        for t in assignment:
            if not (0 <= t < types.k):
                raise ConfigurationError(f"type index {t} out of range")
            counts[t] += 1
        total = sum(c * w for c, w in zip(counts, types.weight_units))
        return cls(graph, types, assignment, counts, total)

    @classmethod
    def monochromatic(cls, graph: Graph, types: TypeSystem, type_index: int) -> "State":
        return cls.from_assignment(graph, types, [type_index] * graph.n)

    @property
    def total_fitness(self) -> Fraction:
        return Fraction(self.total_units, self.types.weight_unit)

    def copy(self) -> "State":
        return State(
            self.graph, self.types, list(self.assignment), list(self.counts),
            self.total_units,
        )

    def apply_reproduction(self, v: int, w: int) -> "State":
        """New state where w takes v's type; everything else unchanged."""
        if w not in self.graph.adjacency[v]:
            raise NotNeighboursError(v, w)
        out = self.copy()
        out.apply_in_place(v, w)
        return out

    def apply_in_place(self, v: int, w: int) -> None:
        # engine path: caller guarantees adjacency
        tv = self.assignment[v]
        tw = self.assignment[w]
        if tv != tw:
            self.assignment[w] = tv
            self.counts[tw] -= 1
            self.counts[tv] += 1
            units = self.types.weight_units
            self.total_units += units[tv] - units[tw]

    def is_absorbed(self) -> int | None:
        """The type occupying every vertex, or None if mixed."""
        n = self.graph.n
        for j, c in enumerate(self.counts):
            if c == n:
                return j
        return None

    def vertices_of_type(self, j: int) -> list[int]:
        return [v for v, t in enumerate(self.assignment) if t == j]

    def validate(self) -> None:
        """Recompute caches from the raw assignment and compare exactly."""
        counts = [0] * self.types.k
        for t in self.assignment:
            counts[t] += 1
        if counts != self.counts:
            raise AssertionError(f"count cache drifted: {self.counts} vs {counts}")
        total = sum(c * w for c, w in zip(counts, self.types.weight_units))
        if total != self.total_units:
            raise AssertionError(
                f"fitness cache drifted: {self.total_units} vs {total}"
            )
        n, ts = self.graph.n, self.types
        assert n * ts.min_fitness <= self.total_fitness <= n * ts.max_fitness

    def key(self) -> tuple[int, ...]:
        """Hashable identity; caches deliberately excluded."""
        return tuple(self.assignment)


def potential(state: State, j: int, graph: Graph | None = None) -> Fraction:
    """Sum of reciprocal degrees over vertices currently of type j.

    Zero on an empty type class; equals sum(1/d(v)) over all vertices
    when the class covers the whole graph.
    """
    g = graph if graph is not None else state.graph
    total = Fraction(0)
    for v, t in enumerate(state.assignment):
        if t == j:
            total += Fraction(1, g.degrees[v])
    return total


def reciprocal_degree_sum(graph: Graph) -> Fraction:
    """The potential ceiling c1 = sum over vertices of 1/d(v)."""
    return sum((Fraction(1, d) for d in graph.degrees), Fraction(0))


@dataclass(frozen=True)
class AbsorptionRecord:
    """Outcome of one replicate run.

    ``outcome`` is "fixated", "extinct" (focal type wiped out before any
    fixation, only in alpha-stopped mode), or "truncated" (step budget
    hit first). ``type_index`` carries the fixated type.
    """

    outcome: str
    type_index: int | None
    steps: int
    seed_key: tuple[int, ...] = field(default=())

    @property
    def fixated(self) -> bool:
        return self.outcome == "fixated"

    def to_json_dict(self, replicate: int, types: TypeSystem) -> dict:
        return {
            "replicate": replicate,
            "outcome": self.outcome,
            "type": None if self.type_index is None else types.names[self.type_index],
            "steps": self.steps,
        }
