from .callgraph import GroupKey, flat_profile, group_labels, to_callgraph
from .correlation import (
    CorrelationMatrix,
    CorrelationMethod,
    PairwiseFit,
    correlation_analysis,
    filter_correlation_matrix,
    pairwise_correlation,
)
from .hot_path import hot_path, resolve_inclusive
from .imbalance import ImbalanceResult, load_imbalance, rank_histograms, rank_percentiles, top_ranks
from .multirun import multirun_analysis, path_labels, unified_table, unify_multiple_graphframes, variability_runs
from .scaling import ScalingRun, scaling_runs, speedup_efficiency

__all__ = [
    "CorrelationMatrix",
    "CorrelationMethod",
    "GroupKey",
    "ImbalanceResult",
    "PairwiseFit",
    "ScalingRun",
    "correlation_analysis",
    "filter_correlation_matrix",
    "flat_profile",
    "group_labels",
    "hot_path",
    "load_imbalance",
    "multirun_analysis",
    "pairwise_correlation",
    "path_labels",
    "rank_histograms",
    "rank_percentiles",
    "resolve_inclusive",
    "scaling_runs",
    "speedup_efficiency",
    "to_callgraph",
    "top_ranks",
    "unified_table",
    "unify_multiple_graphframes",
    "variability_runs",
]
