"""degest: sublinear average-degree estimation over a graph query oracle.

The package splits into five layers: exact graph structures and ground
truth (:mod:`degest.graph`), the counted query interface
(:mod:`degest.oracle`), the estimators (:mod:`degest.estimator`),
synthetic instance families (:mod:`degest.generators`), and the
empirical validation harness (:mod:`degest.verify`).  ``degest.cli``
wires them into the ``degest`` command.
"""

from .estimator import (
    CoinTossResult,
    DegreeEstimate,
    EstimatorConfig,
    EstimatorError,
    MeanEstResult,
    SafetyCapError,
    ZeroDensityError,
    all_advice,
    coin_toss,
    mean_est,
    no_advice,
    threshold_advice,
)
from .generators import (
    GeneratedInstance,
    InfeasibleParameterError,
    gen_clique_matching,
    gen_er,
    gen_forest_union,
    gen_heavy_core,
    gen_lb_pair,
)
from .graph import (
    EdgeListFormatError,
    Graph,
    GraphError,
    GroundTruth,
    Partition,
    build_graph,
    degeneracy,
    ground_truth,
    is_good_threshold,
    load_edge_list,
    partition_by_threshold,
    save_edge_list,
)
from .oracle import EmptyEdgeSetError, QueryCounters, QueryOracle
from .verify import (
    TrialBatchReport,
    TrialRecord,
    in_band,
    lemma_checks,
    run_trials,
    sweep_alpha,
    sweep_epsilon,
)

__version__ = "0.1.0"

__all__ = [
    "CoinTossResult",
    "DegreeEstimate",
    "EstimatorConfig",
    "EstimatorError",
    "MeanEstResult",
    "SafetyCapError",
    "ZeroDensityError",
    "all_advice",
    "coin_toss",
    "mean_est",
    "no_advice",
    "threshold_advice",
    "GeneratedInstance",
    "InfeasibleParameterError",
    "gen_clique_matching",
    "gen_er",
    "gen_forest_union",
    "gen_heavy_core",
    "gen_lb_pair",
    "EdgeListFormatError",
    "Graph",
    "GraphError",
    "GroundTruth",
    "Partition",
    "build_graph",
    "degeneracy",
    "ground_truth",
    "is_good_threshold",
    "load_edge_list",
    "partition_by_threshold",
    "save_edge_list",
    "EmptyEdgeSetError",
    "QueryCounters",
    "QueryOracle",
    "TrialBatchReport",
    "TrialRecord",
    "in_band",
    "lemma_checks",
    "run_trials",
    "sweep_alpha",
    "sweep_epsilon",
    "__version__",
]
