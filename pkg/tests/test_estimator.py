import math
import statistics
from fractions import Fraction

import pytest

from moranlab.errors import ConfigurationError
from moranlab.estimator import (
    EstimatorConfig,
    _quota_for,
    estimate_fixation_probability,
    median_repeats,
    plain_monte_carlo,
    replicate_count,
    run_replicates,
    step_budget,
    wilson_interval,
)
from moranlab.exact import distribution_average, solve
from moranlab.fitness import TypeSystem
from moranlab.graphs import (
    complete_graph,
    cycle_graph,
    path_graph,
    star_graph,
)
from moranlab.initial import InitialDistribution, TooFewVerticesError

TS2 = TypeSystem(names=("o", "m"), fitness=(Fraction(1), Fraction(2)), ordinary=0)
TS3 = TypeSystem(
    names=("o", "b", "c"),
    fitness=(Fraction(1), Fraction(3, 2), Fraction(2)),
    ordinary=0,
)
MUT = InitialDistribution.mut()


# ----------------------------------------------------------- sizing rules


def test_replicate_count_frozen_values():
    # ceil(3 ln(16) * 10 / 0.01) and the n=1, eps->1 corner
    assert replicate_count(0.1, 0.125, 10) == 8318
    assert replicate_count(0.999, 0.125, 1) == 9


def test_replicate_count_scales_linearly_in_n():
    t5 = replicate_count(0.3, 0.125, 5)
    t10 = replicate_count(0.3, 0.125, 10)
    assert t10 in (2 * t5 - 1, 2 * t5)


def test_replicate_count_validation():
    with pytest.raises(ConfigurationError):
        replicate_count(0.0, 0.125, 5)
    with pytest.raises(ConfigurationError):
        replicate_count(0.5, 1.0, 5)


def test_step_budget_frozen_values():
    assert step_budget(complete_graph(10), TS2, 1, t=1) == 176_000
    all_equal = TypeSystem(
        names=("a", "b", "c"),
        fitness=(Fraction(1), Fraction(1), Fraction(1)),
        ordinary=0,
    )
    assert step_budget(complete_graph(5), all_equal, 0, t=1) == 250_000


def test_step_budget_no_tie_term_when_top_unique():
    # unique top type: budget is exactly mult * t * f+/(f+-f*) (n+1) n^3
    n, t = 6, 7
    expected = 8 * t * Fraction(2, 1) * (n + 1) * n**3
    assert step_budget(complete_graph(n), TS2, 1, t=t) == expected


def test_median_repeats():
    assert median_repeats(0.2) == math.ceil(24 * math.log(5))
    assert median_repeats(0.5) == 17
    assert median_repeats(0.96) >= 1


def test_quota_split():
    # total/t each, remainder to the last
    assert [_quota_for(i, 4, 10 // 4, 10 // 4 + 10 % 4) for i in range(4)] == [2, 2, 2, 4]
    assert _quota_for(0, 3, None, None) is None


# --------------------------------------------------------- replicate runs


def test_point_mass_all_focal_fixates_every_replicate():
    dist = InitialDistribution.point_mass([1, 1, 1])
    block = run_replicates(complete_graph(3), TS2, 1, dist, 50, master_seed=1)
    assert block.fixations == 50
    assert block.steps == 0


def test_point_mass_without_focal_never_fixates():
    dist = InitialDistribution.point_mass([0, 0, 0])
    block = run_replicates(complete_graph(3), TS2, 1, dist, 50, master_seed=1)
    assert block.fixations == 0
    assert block.steps == 0  # extinct from the start


def test_zero_budget_truncates_all_mixed_replicates():
    dist = InitialDistribution.point_mass([1, 0, 0])
    block = run_replicates(
        complete_graph(3), TS2, 1, dist, 20, master_seed=1, total_step_budget=0
    )
    assert block.truncated == 20
    assert block.fixations == 0


def test_p3_frequency_within_4_sigma_of_oracle():
    g = path_graph(3)
    t = 100_000
    block = run_replicates(g, TS2, 1, MUT, t, master_seed=99)
    p = 7 / 12  # exact mut-average for this instance
    assert abs(block.fixations / t - p) < 4 * math.sqrt(p * (1 - p) / t)


def test_run_replicates_requires_fittest_alpha():
    with pytest.raises(ConfigurationError):
        run_replicates(complete_graph(3), TS2, 0, MUT, 10, master_seed=0)


def test_mut_needs_enough_vertices_checked_upfront():
    with pytest.raises(TooFewVerticesError):
        run_replicates(complete_graph(2), TS3, 2, MUT, 10, master_seed=0)
    config = EstimatorConfig(eps=0.5, delta=0.5, master_seed=0)
    with pytest.raises(TooFewVerticesError):
        estimate_fixation_probability(complete_graph(2), TS3, 2, MUT, config)


# ----------------------------------------------------------------- scheme


def test_config_validation():
    with pytest.raises(ConfigurationError):
        EstimatorConfig(eps=1.0, delta=0.5)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(eps=0.5, delta=0.0)
    with pytest.raises(ConfigurationError):
        EstimatorConfig(eps=0.5, delta=0.5, mode="plain")  # replicates missing


def test_single_type_short_circuits_to_one():
    ts1 = TypeSystem(names=("only",), fitness=(Fraction(3, 2),), ordinary=0)
    config = EstimatorConfig(eps=0.3, delta=0.3, master_seed=5)
    est = estimate_fixation_probability(complete_graph(4), ts1, 0, MUT, config)
    assert est.value == 1
    assert est.total_steps == 0
    assert not est.truncation_occurred


def test_estimate_is_deterministic_and_median_consistent():
    config = EstimatorConfig(eps=0.5, delta=0.5, master_seed=31337)
    g = complete_graph(3)
    a = estimate_fixation_probability(g, TS2, 1, MUT, config)
    b = estimate_fixation_probability(g, TS2, 1, MUT, config)
    assert a == b
    assert a.value == statistics.median(
        Fraction(w, a.t) for w in a.fixations_per_repeat
    )
    assert 0 <= a.value <= 1
    assert a.repeats == median_repeats(0.5)
    assert a.t == replicate_count(0.5, 0.125, 3)


def test_threads_do_not_change_the_result():
    g = complete_graph(3)
    one = run_replicates(g, TS2, 1, MUT, 400, master_seed=7, threads=1)
    three = run_replicates(g, TS2, 1, MUT, 400, master_seed=7, threads=3)
    assert one == three
    cfg1 = EstimatorConfig(eps=0.5, delta=0.5, master_seed=12, threads=1)
    cfg2 = EstimatorConfig(eps=0.5, delta=0.5, master_seed=12, threads=2)
    assert estimate_fixation_probability(
        g, TS2, 1, MUT, cfg1
    ) == estimate_fixation_probability(g, TS2, 1, MUT, cfg2)


def test_k2_estimate_lands_in_wide_window():
    # eps=0.5, delta=0.5 around the exact 2/3
    config = EstimatorConfig(eps=0.5, delta=0.5, master_seed=2)
    est = estimate_fixation_probability(complete_graph(2), TS2, 1, MUT, config)
    assert Fraction(1, 3) <= est.value <= Fraction(1, 1)
    assert not est.truncation_occurred


def test_k3_contract_single_run():
    config = EstimatorConfig(eps=0.2, delta=0.2, master_seed=3)
    est = estimate_fixation_probability(complete_graph(3), TS2, 1, MUT, config)
    target = Fraction(4, 7)
    assert (1 - Fraction(2, 10)) * target <= est.value <= (1 + Fraction(2, 10)) * target
    assert est.step_budget_per_repeat == step_budget(complete_graph(3), TS2, 1, est.t)


def test_estimate_json_shape():
    config = EstimatorConfig(eps=0.5, delta=0.5, master_seed=8)
    est = estimate_fixation_probability(path_graph(3), TS2, 1, MUT, config)
    doc = est.to_json_dict()
    assert set(doc) >= {
        "estimate", "eps", "delta", "t", "medianRepeats",
        "fixationsPerRepeat", "truncated", "totalSteps", "masterSeed",
    }
    assert len(doc["fixationsPerRepeat"]) == doc["medianRepeats"]
    assert all(0 <= w <= doc["t"] for w in doc["fixationsPerRepeat"])


# ------------------------------------------------------ unbiasedness suite


def _instances():
    yield complete_graph(2), TS2
    yield complete_graph(3), TS2
    yield complete_graph(4), TS2
    yield path_graph(3), TS2
    yield path_graph(4), TS2
    yield path_graph(5), TS2
    yield cycle_graph(4), TS2
    yield star_graph(4), TS2
    yield complete_graph(3), TS3
    yield star_graph(4), TS3


def test_frequency_is_unbiased_against_oracle_across_instances():
    """10-instance coverage: observed frequency within 4 sigma of exact."""
    for seed, (g, ts) in enumerate(_instances(), start=5000):
        alpha = ts.k - 1
        p = float(distribution_average(solve(g, ts), MUT)[alpha])
        t = 4000
        block = run_replicates(g, ts, alpha, MUT, t, master_seed=seed)
        sigma = math.sqrt(p * (1 - p) / t)
        assert abs(block.fixations / t - p) < 4 * sigma, (g.n, ts.k)


# ---------------------------------------------------------------- plain MC


def test_plain_mc_degenerate():
    dist = InitialDistribution.point_mass([1, 1, 1])
    res = plain_monte_carlo(complete_graph(3), TS2, 1, dist, 1, master_seed=0)
    assert res.estimate == 1
    assert 0 <= res.ci_low <= res.ci_high <= 1
    assert res.mean_steps == 0


def test_plain_mc_rejects_zero_replicates():
    with pytest.raises(ConfigurationError):
        plain_monte_carlo(complete_graph(3), TS2, 1, MUT, 0, master_seed=0)


def test_plain_mc_ci_covers_exact_value():
    g = complete_graph(4)
    res = plain_monte_carlo(g, TS2, 1, MUT, 20_000, master_seed=4)
    p = 8 / 15  # (1 - 1/2) / (1 - 1/2^4)
    assert res.ci_low <= p <= res.ci_high
    assert res.max_steps >= res.mean_steps > 0


def test_wilson_interval_basics():
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
