"""Randomised (1 +- eps) estimation of the fixation probability of a
maximally fit type, plus a plain Monte Carlo diagnostic mode.

The scheme: run t = ceil(3 ln(2/delta') n / eps^2) stopped simulations
and report the fixation frequency w/t; cap the total step budget at
budget_multiplier * t * B(n), where B(n) is the proven per-replicate
expected-absorption bound, returning 0 if the cap is hit (Markov bounds
that by 1/8); amplify to confidence 1-delta by taking the median of
m = ceil(24 ln(1/delta)) such estimates.

Budget enforcement is split into per-replicate quotas (total/t each,
remainder to the last) so that outcomes are bit-identical no matter how
replicates are scheduled across workers. Replicate i of repeat r draws
everything from the stream keyed (master_seed, r, i).
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bounds import fittest_type_absorption_bound
from .errors import ConfigurationError
from .fitness import TypeSystem
from .graphs import Graph
from .initial import InitialDistribution, TooFewVerticesError, sample
from .process import run_to_absorption
from .rng import stream

WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class EstimatorConfig:
    eps: float
    delta: float
    delta_prime: float = 0.125
    master_seed: int = 0
    mode: str = "fptras"  # "fptras" | "plain"
    replicates: int | None = None  # plain mode only
    budget_multiplier: int = 8
    threads: int = 1

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ConfigurationError(f"eps must be in (0,1), got {self.eps}")
        if not (0.0 < self.delta < 1.0):
            raise ConfigurationError(f"delta must be in (0,1), got {self.delta}")
        if not (0.0 < self.delta_prime < 1.0):
            raise ConfigurationError(
                f"delta_prime must be in (0,1), got {self.delta_prime}"
            )
        if self.mode not in ("fptras", "plain"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.mode == "plain" and (self.replicates is None or self.replicates < 1):
            raise ConfigurationError("plain mode needs replicates >= 1")
        if self.budget_multiplier < 1:
            raise ConfigurationError("budget multiplier must be >= 1")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")


def replicate_count(eps: float, delta_prime: float, n: int) -> int:
    """Stopped simulations needed for one estimate: ceil(3 ln(2/d') n / eps^2)."""
    if not (0.0 < eps < 1.0) or not (0.0 < delta_prime < 1.0):
        raise ConfigurationError("eps and delta_prime must be in (0,1)")
    if n < 1:
        raise ConfigurationError("need n >= 1")
    return math.ceil(3.0 * math.log(2.0 / delta_prime) * n / (eps * eps))


def median_repeats(delta: float) -> int:
    """Median-amplification count: each estimate succeeds with probability
    >= 3/4, so ceil(24 ln(1/delta)) repeats push failure below delta."""
    if not (0.0 < delta < 1.0):
        raise ConfigurationError("delta must be in (0,1)")
    return max(1, math.ceil(24.0 * math.log(1.0 / delta)))


def per_replicate_step_bound(graph: Graph, ts: TypeSystem, alpha: int) -> Fraction:
    """B(n): proven bound on the expected stopped steps of one replicate."""
    return fittest_type_absorption_bound(graph, ts, alpha)


def step_budget(
    graph: Graph, ts: TypeSystem, alpha: int, t: int, multiplier: int = 8
) -> int:
    """Total step cap for one estimate of t replicates, exactly evaluated."""
    total = Fraction(multiplier) * t * per_replicate_step_bound(graph, ts, alpha)
    return math.ceil(total)


@dataclass
class ReplicateBlock:
    """Aggregate of one batch of alpha-stopped replicates."""

    fixations: int
    replicates: int
    steps: int
    truncated: int
    max_steps: int

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.fixations, self.replicates)


def _quota_for(i: int, t: int, quota_base, quota_last):
    if quota_base is None:
        return None
    return quota_last if i == t - 1 else quota_base


def _run_range(args) -> tuple[int, int, int, int]:
    (graph, ts, alpha, dist, master_seed, repeat, start, stop, t,
     quota_base, quota_last) = args
    w = steps = truncated = max_steps = 0
    for i in range(start, stop):
        rng = stream(master_seed, repeat, i)
        m0 = sample(dist, graph, ts, rng)
        rec = run_to_absorption(
            m0,
            _quota_for(i, t, quota_base, quota_last),
            rng,
            mode="alpha",
            alpha=alpha,
            seed_key=(repeat, i),
        )
        if rec.outcome == "fixated":
            w += 1
        elif rec.outcome == "truncated":
            truncated += 1
        steps += rec.steps
        if rec.steps > max_steps:
            max_steps = rec.steps
    return w, steps, truncated, max_steps


def run_replicates(
    graph: Graph,
    ts: TypeSystem,
    alpha: int,
    dist: InitialDistribution,
    t: int,
    master_seed: int,
    *,
    repeat: int = 0,
    total_step_budget: int | None = None,
    threads: int = 1,
) -> ReplicateBlock:
    """t independent alpha-stopped simulations; the fixation frequency
    of the block is an unbiased estimate of the fixation probability.

    The optional budget is distributed as per-replicate quotas; results
    do not depend on ``threads``.
    """
    if alpha not in ts.fittest_types:
        raise ConfigurationError(
            f"type {ts.names[alpha]!r} must have maximum fitness"
        )
    if t < 1:
        raise ConfigurationError("need at least one replicate")
    if dist.kind == "mut" and graph.n < ts.k:
        raise TooFewVerticesError(graph.n, ts.k)
    quota_base = quota_last = None
    if total_step_budget is not None:
        quota_base = total_step_budget // t
        quota_last = quota_base + total_step_budget % t
    if threads > 1 and dist.kind != "oracle":
        bounds_list = [
            (t * c // threads, t * (c + 1) // threads) for c in range(threads)
        ]
        jobs = [
            (graph, ts, alpha, dist, master_seed, repeat, lo, hi, t,
             quota_base, quota_last)
            for lo, hi in bounds_list
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_range, jobs))
    else:
        parts = [
            _run_range(
                (graph, ts, alpha, dist, master_seed, repeat, 0, t, t,
                 quota_base, quota_last)
            )
        ]
    w = sum(p[0] for p in parts)
    steps = sum(p[1] for p in parts)
    truncated = sum(p[2] for p in parts)
    max_steps = max(p[3] for p in parts)
    return ReplicateBlock(w, t, steps, truncated, max_steps)


@dataclass
class Estimate:
    """Point estimate with full accounting of how it was produced."""

    value: Fraction
    eps: float
    delta: float
    t: int
    repeats: int
    fixations_per_repeat: list[int]
    repeat_truncated: list[bool]
    total_steps: int
    master_seed: int
    step_budget_per_repeat: int | None
    alpha_name: str

    @property
    def truncation_occurred(self) -> bool:
        return any(self.repeat_truncated)

    def to_json_dict(self) -> dict:
        return {
            "estimate": float(self.value),
            "estimateExact": str(self.value),
            "eps": self.eps,
            "delta": self.delta,
            "t": self.t,
            "medianRepeats": self.repeats,
            "fixationsPerRepeat": list(self.fixations_per_repeat),
            "truncated": self.truncation_occurred,
            "truncatedRepeats": sum(self.repeat_truncated),
            "totalSteps": self.total_steps,
            "masterSeed": self.master_seed,
            "stepBudgetPerRepeat": self.step_budget_per_repeat,
            "alpha": self.alpha_name,
        }


def estimate_fixation_probability(
    graph: Graph,
    ts: TypeSystem,
    alpha: int,
    dist: InitialDistribution,
    config: EstimatorConfig,
) -> Estimate:
    """The full scheme: median of budget-capped fixation frequencies.

    Guarantee (for alpha of maximum fitness and an admissible start
    distribution): the returned value is within (1 +- eps) of the true
    fixation probability with probability at least 1 - delta.
    """
    if alpha not in ts.fittest_types:
        raise ConfigurationError(
            f"type {ts.names[alpha]!r} must have maximum fitness"
        )
    if dist.kind == "mut" and graph.n < ts.k:
        raise TooFewVerticesError(graph.n, ts.k)
    t = replicate_count(config.eps, config.delta_prime, graph.n)
    m = median_repeats(config.delta)
    if ts.k == 1:
        # the single type occupies every vertex from the start
        return Estimate(
            value=Fraction(1),
            eps=config.eps,
            delta=config.delta,
            t=t,
            repeats=m,
            fixations_per_repeat=[t] * m,
            repeat_truncated=[False] * m,
            total_steps=0,
            master_seed=config.master_seed,
            step_budget_per_repeat=None,
            alpha_name=ts.names[alpha],
        )
    budget = step_budget(graph, ts, alpha, t, config.budget_multiplier)
    fixations: list[int] = []
    truncated: list[bool] = []
    values: list[Fraction] = []
    total_steps = 0
    for repeat in range(m):
        block = run_replicates(
            graph, ts, alpha, dist, t, config.master_seed,
            repeat=repeat, total_step_budget=budget, threads=config.threads,
        )
        total_steps += block.steps
        if block.truncated:
            # the capped estimate reports 0 when its budget is exhausted
            fixations.append(0)
            truncated.append(True)
            values.append(Fraction(0))
        else:
            fixations.append(block.fixations)
            truncated.append(False)
            values.append(block.frequency)
    return Estimate(
        value=statistics.median(values),
        eps=config.eps,
        delta=config.delta,
        t=t,
        repeats=m,
        fixations_per_repeat=fixations,
        repeat_truncated=truncated,
        total_steps=total_steps,
        master_seed=config.master_seed,
        step_budget_per_repeat=budget,
        alpha_name=ts.names[alpha],
    )


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials < 1:
        raise ConfigurationError("need at least one trial")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    # the limits are exactly 0 / 1 at the boundary counts; keep them so
    low = 0.0 if successes == 0 else max(0.0, centre - half)
    high = 1.0 if successes == trials else min(1.0, centre + half)
    return low, high


@dataclass
class MonteCarloResult:
    estimate: Fraction
    ci_low: float
    ci_high: float
    replicates: int
    fixations: int
    truncated: int
    mean_steps: float
    max_steps: int
    total_steps: int
    master_seed: int

    def to_json_dict(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "estimateExact": str(self.estimate),
            "ci95": [self.ci_low, self.ci_high],
            "replicates": self.replicates,
            "fixations": self.fixations,
            "truncated": self.truncated,
            "meanSteps": self.mean_steps,
            "maxSteps": self.max_steps,
            "totalSteps": self.total_steps,
            "masterSeed": self.master_seed,
        }


def plain_monte_carlo(
    graph: Graph,
    ts: TypeSystem,
    alpha: int,
    dist: InitialDistribution,
    replicates: int,
    master_seed: int,
    *,
    max_steps_per_replicate: int | None = None,
    threads: int = 1,
) -> MonteCarloResult:
    """Fixation frequency with a Wilson 95% interval and step statistics."""
    if replicates < 1:
        raise ConfigurationError("need replicates >= 1")
    if dist.kind == "mut" and graph.n < ts.k:
        raise TooFewVerticesError(graph.n, ts.k)
    quota = max_steps_per_replicate
    if threads > 1 and dist.kind != "oracle":
        bounds_list = [
            (replicates * c // threads, replicates * (c + 1) // threads)
            for c in range(threads)
        ]
        jobs = [
            (graph, ts, alpha, dist, master_seed, 0, lo, hi, replicates, quota, quota)
            for lo, hi in bounds_list
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_range, jobs))
    else:
        parts = [
            _run_range(
                (graph, ts, alpha, dist, master_seed, 0, 0, replicates,
                 replicates, quota, quota)
            )
        ]
    w = sum(p[0] for p in parts)
    steps = sum(p[1] for p in parts)
    truncated = sum(p[2] for p in parts)
    max_steps = max(p[3] for p in parts)
    low, high = wilson_interval(w, replicates)
    return MonteCarloResult(
        estimate=Fraction(w, replicates),
        ci_low=low,
        ci_high=high,
        replicates=replicates,
        fixations=w,
        truncated=truncated,
        mean_steps=steps / replicates,
        max_steps=max_steps,
        total_steps=steps,
        master_seed=master_seed,
    )
