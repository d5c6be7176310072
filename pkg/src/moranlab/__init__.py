"""moranlab: multi-type Moran processes on graphs.

Simulation (discrete and continuous time), exact small-instance
solving, analytic bounds, and randomised (1 +- eps, 1 - delta)
estimation of fixation probabilities.
"""

__version__ = "0.1.0"

from .graphs import Graph, complete_graph, parse_graph
from .fitness import TypeSystem, merge_to_two_types, parse_types
from .state import AbsorptionRecord, State, potential
from .process import StepSampler, one_step_drift, run_to_absorption, step
from .continuous import continuous_step, coupled_run
from .initial import InitialDistribution, sample, sample_mut
from .exact import ExactSolution, distribution_average, solve
from .estimator import (
    Estimate,
    EstimatorConfig,
    estimate_fixation_probability,
    plain_monte_carlo,
    replicate_count,
    run_replicates,
    step_budget,
)
from .bounds import (
    BoundReport,
    absorption_time_bounds,
    complete_graph_sandwich,
    fittest_type_absorption_bound,
    fixation_lower_bound,
)

__all__ = [
    "Graph",
    "TypeSystem",
    "State",
    "AbsorptionRecord",
    "StepSampler",
    "InitialDistribution",
    "ExactSolution",
    "Estimate",
    "EstimatorConfig",
    "BoundReport",
    "complete_graph",
    "parse_graph",
    "parse_types",
    "merge_to_two_types",
    "potential",
    "step",
    "run_to_absorption",
    "one_step_drift",
    "continuous_step",
    "coupled_run",
    "sample",
    "sample_mut",
    "solve",
    "distribution_average",
    "estimate_fixation_probability",
    "plain_monte_carlo",
    "replicate_count",
    "step_budget",
    "run_replicates",
    "absorption_time_bounds",
    "complete_graph_sandwich",
    "fittest_type_absorption_bound",
    "fixation_lower_bound",
]
