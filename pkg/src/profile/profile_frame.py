import logging
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from src.utils.config import Config
from src.utils.errors import NotATree, SchemaError, UnknownMetric
from .graph import CallGraph, NodeId

logger = logging.getLogger(__name__)

INDEX_NAMES = ["node", "rank"]


class RankStat(str, Enum):
    SUM = "sum"
    MEAN = "mean"
    MAX = "max"
    MIN = "min"


def inclusive_name(metric: str) -> str:
    return metric if metric.endswith(Config.INCLUSIVE_SUFFIX) else metric + Config.INCLUSIVE_SUFFIX


def exclusive_name(metric: str) -> str:
    return metric[:-len(Config.INCLUSIVE_SUFFIX)] if metric.endswith(Config.INCLUSIVE_SUFFIX) else metric


def full_index(num_nodes: int, num_ranks: int) -> pd.MultiIndex:
    return pd.MultiIndex.from_product([range(num_nodes), range(num_ranks)], names=INDEX_NAMES)


class ProfileFrame:
    """
    A CallGraph plus a (node, rank)-indexed metric table.

    ``dataframe`` holds one row per node and rank, nulls as NaN. Apart from
    unify_multiple_graphframes, which rebinds ``graph`` and ``dataframe`` in
    place, a ProfileFrame is never mutated after construction.
    """

    def __init__(self, graph: CallGraph, dataframe: pd.DataFrame, num_ranks: int, exec_id: str = "",
                 default_metric: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None):
        if num_ranks < 1:
            raise SchemaError(f"rank count must be >= 1, got {num_ranks}")
        if len(dataframe.columns) == 0:
            raise SchemaError("a profile needs at least one metric")
        if not dataframe.index.equals(full_index(len(graph), num_ranks)):
            raise SchemaError(
                f"metric table must have exactly {num_ranks} rows per node for {len(graph)} nodes, "
                f"got {len(dataframe)} rows"
            )

        self.graph = graph
        self.dataframe = dataframe
        self.num_ranks = int(num_ranks)
        self.exec_id = exec_id
        self.metadata: Dict[str, Any] = dict(metadata or {})

        if default_metric is None:
            default_metric = Config.DEFAULT_METRIC if Config.DEFAULT_METRIC in dataframe.columns \
                else dataframe.columns[0]
        if default_metric not in dataframe.columns:
            raise UnknownMetric(default_metric, exec_id or None)
        self.default_metric = default_metric

    @classmethod
    def from_arrays(cls, graph: CallGraph, metrics: Mapping[str, np.ndarray], exec_id: str = "",
                    default_metric: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None,
                    num_ranks: Optional[int] = None) -> "ProfileFrame":
        """Build from per-metric arrays shaped (nodes, ranks)"""
        if num_ranks is None:
            shapes = {np.shape(values) for values in metrics.values()}
            if len(shapes) != 1:
                raise SchemaError(f"metric arrays disagree on shape: {sorted(shapes)}")
            num_ranks = shapes.pop()[1]

        columns = {}
        for name, values in metrics.items():
            array = np.asarray(values, dtype=np.float64)
            if array.shape != (len(graph), num_ranks):
                raise SchemaError(f"expected shape {(len(graph), num_ranks)}, got {array.shape}", name)
            columns[name] = array.reshape(-1)

        dataframe = pd.DataFrame(columns, index=full_index(len(graph), num_ranks))
        return cls(graph, dataframe, num_ranks, exec_id, default_metric, metadata)

    def __repr__(self):
        return (f"ProfileFrame(exec_id={self.exec_id!r}, nodes={len(self.graph)}, "
                f"ranks={self.num_ranks}, metrics={self.metric_names})")

    @property
    def metric_names(self) -> List[str]:
        return list(self.dataframe.columns)

    def check_metric(self, metric: str):
        if metric not in self.dataframe.columns:
            raise UnknownMetric(metric, self.exec_id or None)

    def matrix(self, metric: str) -> np.ndarray:
        """Values of ``metric`` as a (nodes, ranks) array"""
        self.check_metric(metric)
        return self.dataframe[metric].to_numpy(dtype=np.float64).reshape(len(self.graph), self.num_ranks)

    def copy(self) -> "ProfileFrame":
        return ProfileFrame(self.graph, self.dataframe.copy(), self.num_ranks, self.exec_id,
                            self.default_metric, self.metadata)

    def with_columns(self, columns: Mapping[str, np.ndarray]) -> "ProfileFrame":
        """New frame sharing the graph, with (nodes, ranks) columns added or replaced"""
        dataframe = self.dataframe.copy()
        for name, values in columns.items():
            dataframe[name] = np.asarray(values, dtype=np.float64).reshape(-1)
        return ProfileFrame(self.graph, dataframe, self.num_ranks, self.exec_id,
                            self.default_metric, self.metadata)

    def find_nodes(self, name: str) -> List[NodeId]:
        return [node for node in self.graph.traverse() if self.graph.frame(node).name == name]

    def node_labels(self) -> pd.DataFrame:
        """name / file / line per node, indexed by NodeId"""
        frames = self.graph.frames
        labels = pd.DataFrame({
            "name": [f.name for f in frames],
            "file": [f.file for f in frames],
            "line": pd.array([f.line for f in frames], dtype="Int64"),
        })
        labels.index.name = "node"
        return labels

    def aggregate_over_ranks(self, metric: str, stat="sum") -> pd.Series:
        return aggregate_over_ranks(self, metric, stat)

    def inclusive_from_exclusive(self, metric: str) -> "ProfileFrame":
        return inclusive_from_exclusive(self, metric)

    def validate_inclusive(self, tolerance: float = 1e-9):
        """Every "M (inc)" value must be >= its exclusive "M" where both exist"""
        for column in self.metric_names:
            base = exclusive_name(column)
            if column == base or base not in self.dataframe.columns:
                continue
            inc = self.dataframe[column].to_numpy()
            exc = self.dataframe[base].to_numpy()
            both = ~(np.isnan(inc) | np.isnan(exc))
            slack = tolerance * np.maximum(1.0, np.abs(exc[both]))
            bad = np.flatnonzero(inc[both] < exc[both] - slack)
            if bad.size:
                row = self.dataframe.index[np.flatnonzero(both)[bad[0]]]
                raise SchemaError(f"inclusive value below exclusive value at node {row[0]}, rank {row[1]}",
                                  column)


def aggregate_over_ranks(pf: ProfileFrame, metric: str, stat="sum") -> pd.Series:
    """
    Collapse the rank dimension of ``metric``; nulls are skipped and a node
    with no values at all stays null.
    """
    stat = RankStat(stat)
    frame = pd.DataFrame(pf.matrix(metric))
    if stat is RankStat.SUM:
        result = frame.sum(axis=1, min_count=1)
    elif stat is RankStat.MEAN:
        result = frame.mean(axis=1)
    elif stat is RankStat.MAX:
        result = frame.max(axis=1)
    else:
        result = frame.min(axis=1)
    result.index.name = "node"
    result.name = metric
    return result


def inclusive_from_exclusive(pf: ProfileFrame, metric: str) -> ProfileFrame:
    """Add "metric (inc)": per rank, the sum of ``metric`` over each node's subtree"""
    if not pf.graph.is_tree:
        raise NotATree("inclusive metrics can only be derived on a calling context tree")
    metric = exclusive_name(metric)
    exclusive = pf.matrix(metric)

    present = (~np.isnan(exclusive)).astype(np.int64)
    totals = np.nan_to_num(exclusive, nan=0.0)
    parents = pf.graph.parent_array
    depth = pf.graph.depth_array

    # Fold each level into its parents, deepest first
    by_depth = np.argsort(depth, kind="stable")
    max_depth = int(depth.max(initial=0))
    bounds = np.searchsorted(depth[by_depth], np.arange(max_depth + 2))
    for level in range(max_depth, 0, -1):
        nodes = by_depth[bounds[level]:bounds[level + 1]]
        np.add.at(totals, parents[nodes], totals[nodes])
        np.add.at(present, parents[nodes], present[nodes])

    inclusive = np.where(present > 0, totals, np.nan)
    logger.debug(f"[MODEL] Derived {inclusive_name(metric)!r} for {pf.exec_id or 'profile'}")
    return pf.with_columns({inclusive_name(metric): inclusive})
