"""Multimodal global optimization with differential evolution.

Canonical DE/rand/1/bin, a penalty-deflated multipopulation engine that
finds all global minimizers of a multimodal function in one run, the
hybrid that uses it to initialize plain DE refinement, a ten-problem
benchmark registry, and an experiment harness with CSV/JSON reporting.
"""

from .benchmarks import BenchmarkProblem, get_problem, list_problems, system_problem
from .core import (
    Bounds,
    DEParams,
    Point,
    RunRecord,
    crossover,
    init_population,
    mutate,
    run_de,
    select_greedy,
    spreading_measure,
)
from .deflation import (
    AnchorSet,
    NonlinearSystem,
    PenaltyParams,
    indicator,
    penalized_objective,
    penalty_term,
    residual_objective,
)
from .errors import ConfigurationError, EvaluationError
from .harness import (
    ExperimentConfig,
    SweepConfig,
    emit_outputs,
    run_experiment,
    run_sweep,
)
from .metrics import AggregateStats, aggregate, count_ngp, group_de_runs, match_minimizers
from .multipop import (
    MultiParams,
    PopulationTensor,
    SubpopState,
    best_of_subpop,
    run_dewi,
    run_mde_itmf,
    selection_step,
    snapshot_anchors,
    subpop_spreading,
)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "AnchorSet",
    "BenchmarkProblem",
    "Bounds",
    "ConfigurationError",
    "DEParams",
    "EvaluationError",
    "ExperimentConfig",
    "MultiParams",
    "NonlinearSystem",
    "PenaltyParams",
    "Point",
    "PopulationTensor",
    "RngStream",
    "RunRecord",
    "SubpopState",
    "SweepConfig",
    "aggregate",
    "best_of_subpop",
    "count_ngp",
    "crossover",
    "emit_outputs",
    "get_problem",
    "group_de_runs",
    "indicator",
    "init_population",
    "list_problems",
    "match_minimizers",
    "mutate",
    "penalized_objective",
    "penalty_term",
    "residual_objective",
    "run_de",
    "run_dewi",
    "run_experiment",
    "run_mde_itmf",
    "run_sweep",
    "select_greedy",
    "selection_step",
    "snapshot_anchors",
    "spreading_measure",
    "subpop_spreading",
    "system_problem",
]
