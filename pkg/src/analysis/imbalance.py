import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.profile.graph import CallGraph
from src.profile.profile_frame import ProfileFrame
from src.utils.errors import InvalidThreshold

logger = logging.getLogger(__name__)

TOP_RANKS = 5
PERCENTILES = (0, 25, 50, 75, 100)
HIST_BINS = 10


@dataclass
class ImbalanceResult:
    """Per-node imbalance table; ``dataframe`` is indexed by NodeId of ``graph``"""
    graph: CallGraph
    metric: str
    dataframe: pd.DataFrame
    exec_id: str = ""
    verbose: bool = False
    threshold: Optional[float] = None
    diagnostics: Dict[str, int] = field(default_factory=dict)

    @property
    def imbalance(self) -> pd.Series:
        return self.dataframe[f"{self.metric}.imbalance"]


def top_ranks(values: np.ndarray, k: int = TOP_RANKS) -> List[List[int]]:
    """Up to k rank ids per row by descending value, ties by ascending rank; nulls never listed"""
    keyed = -values
    keyed[np.isnan(keyed)] = np.inf
    order = np.argsort(keyed, axis=1, kind="stable")[:, :k]
    picked = np.take_along_axis(values, order, axis=1)
    return [
        [int(rank) for rank, value in zip(ranks, row) if not math.isnan(value)]
        for ranks, row in zip(order, picked)
    ]


def rank_percentiles(values: np.ndarray) -> np.ndarray:
    """0/25/50/75/100th percentiles per row, linear interpolation, nulls skipped"""
    return np.nanpercentile(values, PERCENTILES, axis=1).T


def rank_histograms(values: np.ndarray, bins: int = HIST_BINS) -> np.ndarray:
    """
    Counts of ranks in ``bins`` equal-width bins spanning each row's
    [min, max]; the last bin is closed on the right and a row with
    min == max puts everything in bin 0.
    """
    low = np.nanmin(values, axis=1, keepdims=True)
    width = np.nanmax(values, axis=1, keepdims=True) - low
    with np.errstate(invalid="ignore", divide="ignore"):
        position = np.where(width > 0, (values - low) / width * bins, 0.0)
    slots = np.clip(np.floor(position), 0, bins - 1)
    present = ~np.isnan(values)
    counts = np.zeros((values.shape[0], bins), dtype=np.int64)
    for slot in range(bins):
        counts[:, slot] = ((slots == slot) & present).sum(axis=1)
    return counts


def load_imbalance(pf: ProfileFrame, metric: Optional[str] = None, threshold: Optional[float] = None,
                   verbose: bool = False, top: Optional[int] = None) -> ImbalanceResult:
    """
    max / mean of ``metric`` across ranks for every node.

    Nodes whose max is not above ``threshold`` are dropped before the ratio is
    taken, as are nodes whose mean is zero or null. Rows come back sorted by
    imbalance, largest first.
    """
    metric = metric or pf.default_metric
    pf.check_metric(metric)
    if threshold is not None and (math.isnan(threshold) or threshold < 0):
        raise InvalidThreshold(f"threshold must be >= 0, got {threshold}")
    if top is not None and top < 1:
        raise InvalidThreshold(f"top must be at least 1, got {top}")

    matrix = pf.matrix(metric)
    # summed in sorted order so the mean does not depend on rank order
    per_rank = pd.DataFrame(np.sort(matrix, axis=1))
    maxes = per_rank.max(axis=1).to_numpy()
    # the mean of a row lies between its min and max; rounding must not push it out
    means = np.clip(per_rank.mean(axis=1).to_numpy(), per_rank.min(axis=1).to_numpy(), maxes)

    keep = ~np.isnan(means)
    diagnostics = {"dropped_null": int((~keep).sum()), "dropped_threshold": 0, "dropped_zero_mean": 0}
    if threshold is not None:
        above = maxes > threshold
        diagnostics["dropped_threshold"] = int((keep & ~above).sum())
        keep &= above
    zero_mean = keep & (means == 0)
    diagnostics["dropped_zero_mean"] = int(zero_mean.sum())
    keep &= ~zero_mean

    nodes = np.flatnonzero(keep)
    table = pf.node_labels().iloc[nodes].copy()
    table[f"{metric}.max"] = maxes[nodes]
    table[f"{metric}.mean"] = means[nodes]
    table[f"{metric}.imbalance"] = maxes[nodes] / means[nodes]

    if verbose and len(nodes):
        retained = matrix[nodes]
        lists = {
            "ranks": top_ranks(retained),
            "percentiles": [[float(v) for v in row] for row in rank_percentiles(retained)],
            "hist": [[int(c) for c in row] for row in rank_histograms(retained)],
        }
        for column, values in lists.items():
            table[f"{metric}.{column}"] = pd.Series(values, index=table.index, dtype=object)
    elif verbose:
        for column in ("ranks", "percentiles", "hist"):
            table[f"{metric}.{column}"] = pd.Series(dtype=object)

    table = table.sort_values(f"{metric}.imbalance", ascending=False, kind="mergesort")
    if top is not None:
        table = table.head(top)

    logger.info(f"[ANALYSIS] Load imbalance of {metric!r} on {pf.exec_id or 'profile'}: "
                f"{len(table)} nodes kept, diagnostics={diagnostics}")
    return ImbalanceResult(pf.graph, metric, table, pf.exec_id, verbose, threshold, diagnostics)
