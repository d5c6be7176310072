import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from moranlab.fitness import (
    DuplicateTypeNameError,
    FitnessBelowOneError,
    MalformedRationalError,
    SingleTypeError,
    TypeSystem,
    UnknownOrdinaryError,
    merge_to_two_types,
    parse_rational,
    parse_types,
)


def doc(types, ordinary, alpha=None):
    body = {
        "types": [{"name": n, "fitness": f} for n, f in types],
        "ordinary": ordinary,
    }
    if alpha is not None:
        body["alpha"] = alpha
    return json.dumps(body)


def test_two_type_parse():
    ts = parse_types(doc([("wild", "1"), ("m", "2")], "wild"))
    assert ts.max_fitness == 2
    assert ts.fittest_types == (1,)
    assert ts.runner_up_fitness == 1
    assert ts.advantageous


def test_three_levels():
    ts = parse_types(doc([("a", "1"), ("b", "3/2"), ("c", "2")], "a"))
    assert ts.levels == (Fraction(1), Fraction(3, 2), Fraction(2))
    assert ts.level_multiplicities == (1, 1, 1)
    assert ts.max_multiplicity == 1


def test_tie_at_top():
    ts = parse_types(doc([("a", "1"), ("b", "2"), ("c", "2")], "a"))
    assert ts.fittest_types == (1, 2)
    assert ts.max_multiplicity == 2
    assert ts.runner_up_fitness == 1


def test_all_equal_fitness_has_no_runner_up():
    ts = parse_types(doc([("a", "1"), ("b", "1")], "a"))
    assert ts.runner_up_fitness is None
    assert ts.fittest_types == (0, 1)


def test_parse_errors():
    with pytest.raises(FitnessBelowOneError):
        parse_types(doc([("a", "1/2"), ("b", "2")], "a"))
    with pytest.raises(DuplicateTypeNameError):
        parse_types(doc([("a", "1"), ("a", "2")], "a"))
    with pytest.raises(UnknownOrdinaryError):
        parse_types(doc([("a", "1"), ("b", "2")], "zzz"))
    with pytest.raises(MalformedRationalError):
        parse_types(doc([("a", "1"), ("b", "2/0")], "a"))
    with pytest.raises(MalformedRationalError):
        parse_types(doc([("a", "1"), ("b", "fast")], "a"))


def test_parse_rational_forms():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational(2) == Fraction(2)
    assert parse_rational("2.5") == Fraction(5, 2)
    with pytest.raises(MalformedRationalError):
        parse_rational(1.5)  # floats are ambiguous, refuse them
    with pytest.raises(MalformedRationalError):
        parse_rational(True)


def test_alpha_declaration():
    ts = parse_types(doc([("a", "1"), ("b", "2")], "a", alpha="b"))
    assert ts.alpha == 1
    assert parse_types(doc([("a", "1"), ("b", "2")], "a")).alpha is None


rational_fitness = st.fractions(
    min_value=Fraction(1), max_value=Fraction(9), max_denominator=12
)


@given(st.lists(rational_fitness, min_size=1, max_size=6))
@settings(max_examples=200)
def test_derived_statistics_match_independent_scan(fs):
    ts = TypeSystem(
        names=tuple(f"t{i}" for i in range(len(fs))),
        fitness=tuple(fs),
        ordinary=0,
    )
    assert ts.max_fitness == max(fs)
    assert ts.min_fitness == min(fs)
    assert set(ts.fittest_types) == {i for i, f in enumerate(fs) if f == max(fs)}
    assert set(ts.least_fit_types) == {i for i, f in enumerate(fs) if f == min(fs)}
    below_top = [f for f in fs if f != max(fs)]
    assert ts.runner_up_fitness == (max(below_top) if below_top else None)
    if ts.runner_up_fitness is not None:
        assert ts.runner_up_fitness < ts.max_fitness
    assert list(ts.levels) == sorted(set(fs))
    assert sum(ts.level_multiplicities) == len(fs)
    # exact integer weights reproduce the fitness values
    for f, w in zip(fs, ts.weight_units):
        assert Fraction(w, ts.weight_unit) == f


def test_merge_max_competitor():
    ts = parse_types(doc([("a", "1"), ("b", "3/2"), ("c", "2")], "a"))
    merged, g = merge_to_two_types(ts, ts.index_of("c"), "max-competitor")
    assert merged.names == ("c", "b")
    assert merged.fitness == (Fraction(2), Fraction(3, 2))
    assert g == (1, 1, 0)


def test_merge_min_competitor():
    ts = parse_types(doc([("a", "1"), ("b", "3/2"), ("c", "2")], "a"))
    merged, g = merge_to_two_types(ts, ts.index_of("c"), "min-competitor")
    assert merged.names == ("c", "a")
    assert merged.fitness == (Fraction(2), Fraction(1))
    assert g == (1, 1, 0)


@pytest.mark.parametrize("mode", ["max-competitor", "min-competitor"])
def test_merge_two_types_is_identity_like(mode):
    ts = parse_types(doc([("a", "1"), ("b", "2")], "a"))
    merged, g = merge_to_two_types(ts, 1, mode)
    assert merged.names == ("b", "a")
    assert merged.fitness == (Fraction(2), Fraction(1))
    assert g == (1, 0)


def test_merge_single_type_rejected():
    ts = TypeSystem(names=("a",), fitness=(Fraction(1),), ordinary=0)
    with pytest.raises(SingleTypeError):
        merge_to_two_types(ts, 0, "max-competitor")


@given(
    st.lists(rational_fitness, min_size=2, max_size=6),
    st.data(),
)
@settings(max_examples=100)
def test_merge_preserves_fitness_exactly(fs, data):
    ts = TypeSystem(
        names=tuple(f"t{i}" for i in range(len(fs))),
        fitness=tuple(fs),
        ordinary=0,
    )
    alpha = data.draw(st.integers(min_value=0, max_value=len(fs) - 1))
    rivals = [f for i, f in enumerate(fs) if i != alpha]
    hi, _ = merge_to_two_types(ts, alpha, "max-competitor")
    lo, _ = merge_to_two_types(ts, alpha, "min-competitor")
    assert hi.fitness == (fs[alpha], max(rivals))
    assert lo.fitness == (fs[alpha], min(rivals))


def test_description_bits_positive():
    ts = parse_types(doc([("a", "1"), ("b", "3/2")], "a"))
    assert ts.description_bits() >= 4
