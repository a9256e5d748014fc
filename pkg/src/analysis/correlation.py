import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from src.profile.graph import CallGraph
from src.profile.profile_frame import ProfileFrame, aggregate_over_ranks
from src.utils.errors import DegenerateFit, InsufficientData, InvalidThreshold

logger = logging.getLogger(__name__)


class CorrelationMethod(str, Enum):
    PEARSON = "pearson"
    SPEARMAN = "spearman"
    # pandas delegates to scipy's kendalltau, i.e. tau-b
    KENDALL = "kendall"


@dataclass
class CorrelationMatrix:
    metrics: List[str]
    values: pd.DataFrame
    method: CorrelationMethod


@dataclass
class PairwiseFit:
    """Least-squares line of metric_y on metric_x over rank-summed node values"""
    metric_x: str
    metric_y: str
    slope: float
    intercept: float
    rvalue: float
    graph: CallGraph
    dataframe: pd.DataFrame
    exec_id: str = ""

    def outliers(self, n: Optional[int] = None) -> pd.DataFrame:
        """Nodes sorted by distance from the line, farthest first"""
        order = self.dataframe["distance"].abs().sort_values(ascending=False, kind="mergesort").index
        table = self.dataframe.loc[order]
        return table if n is None else table.head(n)


def correlation_analysis(pf: ProfileFrame, metrics: Optional[Sequence[str]] = None,
                         method="pearson") -> CorrelationMatrix:
    """
    Correlation between metrics over all (node, rank) rows. Nulls are dropped
    pair by pair; a metric without variance gets null off-diagonal entries.
    """
    method = CorrelationMethod(method)
    metrics = list(metrics or pf.metric_names)
    if len(metrics) < 2:
        raise InsufficientData("correlation needs at least two metrics")
    for metric in metrics:
        pf.check_metric(metric)

    data = pf.dataframe[metrics]
    for metric in metrics:
        if data[metric].count() < 2:
            raise InsufficientData(f"metric {metric!r} has fewer than 2 non-null observations")

    values = data.corr(method=method.value, min_periods=2).clip(-1.0, 1.0)
    for metric in metrics:
        values.loc[metric, metric] = 1.0 if data[metric].std() > 0 else np.nan

    logger.info(f"[ANALYSIS] {method.value} correlation over {len(metrics)} metrics, {len(data)} rows")
    return CorrelationMatrix(metrics, values, method)


def filter_correlation_matrix(matrix: CorrelationMatrix, min_abs: float) -> CorrelationMatrix:
    """Null every off-diagonal coefficient with |r| < min_abs"""
    if math.isnan(min_abs) or not 0 <= min_abs <= 1:
        raise InvalidThreshold(f"min_abs must be within [0, 1], got {min_abs}")
    keep = matrix.values.abs() >= min_abs
    keep |= pd.DataFrame(np.eye(len(matrix.metrics), dtype=bool), index=keep.index, columns=keep.columns)
    return CorrelationMatrix(list(matrix.metrics), matrix.values.where(keep), matrix.method)


def pairwise_correlation(pf: ProfileFrame, metric_x: str, metric_y: str) -> PairwiseFit:
    """
    Fit metric_y = slope * metric_x + intercept across nodes and record each
    node's fitted value and signed vertical distance from the line.
    """
    x = aggregate_over_ranks(pf, metric_x, "sum").to_numpy()
    y = aggregate_over_ranks(pf, metric_y, "sum").to_numpy()
    nodes = np.flatnonzero(~(np.isnan(x) | np.isnan(y)))
    if len(nodes) < 2:
        raise InsufficientData(f"need at least 2 nodes with both {metric_x!r} and {metric_y!r}")
    xs, ys = x[nodes], y[nodes]
    if np.ptp(xs) == 0:
        raise DegenerateFit(f"every node has the same {metric_x!r}; the regression line is vertical")

    fit = stats.linregress(xs, ys)
    fitted = fit.slope * xs + fit.intercept

    table = pf.node_labels().iloc[nodes].copy()
    table[metric_x] = xs
    table[metric_y] = ys
    table["fitted"] = fitted
    table["distance"] = ys - fitted

    logger.info(f"[ANALYSIS] Pairwise fit {metric_y!r} ~ {metric_x!r}: slope={fit.slope:.6g}, "
                f"intercept={fit.intercept:.6g}, r={fit.rvalue:.4f}")
    return PairwiseFit(metric_x, metric_y, float(fit.slope), float(fit.intercept), float(fit.rvalue),
                       pf.graph, table, pf.exec_id)
