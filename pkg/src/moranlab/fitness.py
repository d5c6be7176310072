"""Type sets and exact-rational fitness functions.

All fitness values are kept as ``fractions.Fraction`` (>= 1 everywhere)
and every derived statistic is computed exactly. The simulation engine
gets a shared-denominator integer weight per type, so selection
probabilities stay exact end to end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigurationError, InputFormatError


class TypeSystemError(InputFormatError):
    pass


class FitnessBelowOneError(TypeSystemError):
    def __init__(self, name: str, value: Fraction):
        super().__init__(f"type {name!r} has fitness {value} < 1")


class DuplicateTypeNameError(TypeSystemError):
    def __init__(self, name: str):
        super().__init__(f"duplicate type name {name!r}")


class UnknownOrdinaryError(TypeSystemError):
    def __init__(self, name: str):
        super().__init__(f"ordinary type {name!r} is not in the type set")


class MalformedRationalError(TypeSystemError):
    def __init__(self, text: object):
        super().__init__(f"cannot read {text!r} as an exact rational")


class SingleTypeError(ConfigurationError):
    pass


def parse_rational(value) -> Fraction:
    """Exact rational from "p/q" / decimal strings or ints. Floats are refused."""
    if isinstance(value, bool):
        raise MalformedRationalError(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise MalformedRationalError(value)
    raise MalformedRationalError(value)


def format_rational(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class TypeSystem:
    """Ordered type set with exact fitness values and derived statistics.

    ``alpha`` is an optional declared focal type carried through from the
    input document; operations that need a focal type always take it
    explicitly and never pick one silently.
    """

    names: tuple[str, ...]
    fitness: tuple[Fraction, ...]
    ordinary: int
    alpha: int | None = None

    max_fitness: Fraction = field(init=False)
    min_fitness: Fraction = field(init=False)
    fittest_types: tuple[int, ...] = field(init=False)
    least_fit_types: tuple[int, ...] = field(init=False)
    #: max fitness over types outside the fittest set; None when all tie
    runner_up_fitness: Fraction | None = field(init=False)
    #: distinct fitness values in increasing order with their multiplicities
    levels: tuple[Fraction, ...] = field(init=False)
    level_multiplicities: tuple[int, ...] = field(init=False)
    max_multiplicity: int = field(init=False)
    #: integer weight per type over the shared denominator ``weight_unit``
    weight_units: tuple[int, ...] = field(init=False)
    weight_unit: int = field(init=False)

    def __post_init__(self):
        if len(self.names) < 1:
            raise TypeSystemError("need at least one type")
        seen = set()
        for name in self.names:
            if name in seen:
                raise DuplicateTypeNameError(name)
            seen.add(name)
        for name, f in zip(self.names, self.fitness):
            if f < 1:
                raise FitnessBelowOneError(name, f)
        if not (0 <= self.ordinary < len(self.names)):
            raise UnknownOrdinaryError(str(self.ordinary))
        if self.alpha is not None and not (0 <= self.alpha < len(self.names)):
            raise TypeSystemError(f"alpha index {self.alpha} out of range")

        fmax = max(self.fitness)
        fmin = min(self.fitness)
        top = tuple(i for i, f in enumerate(self.fitness) if f == fmax)
        bottom = tuple(i for i, f in enumerate(self.fitness) if f == fmin)
        rest = [f for f in self.fitness if f != fmax]
        runner_up = max(rest) if rest else None

        levels = tuple(sorted(set(self.fitness)))
        mult = tuple(sum(1 for f in self.fitness if f == lv) for lv in levels)

        unit = math.lcm(*(f.denominator for f in self.fitness))
        units = tuple(int(f * unit) for f in self.fitness)

        object.__setattr__(self, "max_fitness", fmax)
        object.__setattr__(self, "min_fitness", fmin)
        object.__setattr__(self, "fittest_types", top)
        object.__setattr__(self, "least_fit_types", bottom)
        object.__setattr__(self, "runner_up_fitness", runner_up)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "level_multiplicities", mult)
        object.__setattr__(self, "max_multiplicity", max(mult))
        object.__setattr__(self, "weight_units", units)
        object.__setattr__(self, "weight_unit", unit)

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def advantageous(self) -> bool:
        return self.ordinary in self.least_fit_types

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise TypeSystemError(f"unknown type name {name!r}")

    def mutant_types(self) -> tuple[int, ...]:
        """Non-ordinary type indices in declaration order."""
        return tuple(i for i in range(self.k) if i != self.ordinary)

    def description_bits(self) -> int:
        """Bit-length of all numerators and denominators (diagnostic only)."""
        return sum(
            f.numerator.bit_length() + f.denominator.bit_length()
            for f in self.fitness
        )

    def fingerprint(self) -> str:
        parts = [
            f"{name}={f}{'*' if i == self.ordinary else ''}"
            for i, (name, f) in enumerate(zip(self.names, self.fitness))
        ]
        return ";".join(parts)


def parse_types(text: str) -> TypeSystem:
    """Parse the JSON type document.

    Shape: {"types": [{"name": ..., "fitness": "p/q"}, ...],
            "ordinary": name, "alpha": name (optional)}.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TypeSystemError(f"invalid JSON: {e}")
    if not isinstance(doc, dict) or "types" not in doc:
        raise TypeSystemError("document must be an object with a 'types' list")
    entries = doc["types"]
    if not isinstance(entries, list) or not entries:
        raise TypeSystemError("'types' must be a non-empty list")
    names: list[str] = []
    fitness: list[Fraction] = []
    for entry in entries:
        if not isinstance(entry, dict) or "name" not in entry or "fitness" not in entry:
            raise TypeSystemError(f"bad type entry {entry!r}")
        names.append(str(entry["name"]))
        fitness.append(parse_rational(entry["fitness"]))
    if "ordinary" not in doc:
        raise UnknownOrdinaryError("<missing>")
    ordinary_name = str(doc["ordinary"])
    if ordinary_name not in names:
        raise UnknownOrdinaryError(ordinary_name)
    alpha: int | None = None
    if doc.get("alpha") is not None:
        alpha_name = str(doc["alpha"])
        if alpha_name not in names:
            raise TypeSystemError(f"alpha {alpha_name!r} is not in the type set")
        alpha = names.index(alpha_name)
    return TypeSystem(
        names=tuple(names),
        fitness=tuple(fitness),
        ordinary=names.index(ordinary_name),
        alpha=alpha,
    )


def merge_to_two_types(
    ts: TypeSystem, alpha: int, mode: str
) -> tuple[TypeSystem, tuple[int, ...]]:
    """Collapse all competitors of ``alpha`` into a single type.

    ``mode`` selects the surviving competitor fitness: "max-competitor"
    keeps the strongest rival, "min-competitor" the weakest. Returns the
    two-type system (alpha first) and the type-index map g with
    g[alpha] = 0 and g[j] = 1 otherwise; applying g vertex-wise maps any
    state of the original system onto the merged one.
    """
    if ts.k < 2:
        raise SingleTypeError("merging needs at least two types")
    if not (0 <= alpha < ts.k):
        raise TypeSystemError(f"alpha index {alpha} out of range")
    rivals = [(f, i) for i, f in enumerate(ts.fitness) if i != alpha]
    if mode == "max-competitor":
        beta = max(rivals, key=lambda p: (p[0], -p[1]))[1]
    elif mode == "min-competitor":
        beta = min(rivals, key=lambda p: (p[0], p[1]))[1]
    else:
        raise ValueError(f"mode must be 'max-competitor' or 'min-competitor', got {mode!r}")
    merged = TypeSystem(
        names=(ts.names[alpha], ts.names[beta]),
        fitness=(ts.fitness[alpha], ts.fitness[beta]),
        ordinary=1,
        alpha=0,
    )
    mapping = tuple(0 if j == alpha else 1 for j in range(ts.k))
    return merged, mapping
