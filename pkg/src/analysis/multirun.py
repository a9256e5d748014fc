import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.profile.graph import CallGraph, Frame
from src.profile.profile_frame import INDEX_NAMES, ProfileFrame, aggregate_over_ranks, full_index
from src.utils.config import Config
from src.utils.errors import DuplicateExecId, InvalidArity, InvalidThreshold, NotATree, SchemaError, UnknownMetric
from .callgraph import GroupKey, flat_profile

logger = logging.getLogger(__name__)

# executions x code locations, indexed by exec_id (or another run label)
PivotTable = pd.DataFrame

PATH_SEPARATOR = " > "


def unify_multiple_graphframes(pfs: Sequence[ProfileFrame]) -> CallGraph:
    """
    Rebind every profile, in place, to one union graph of all their call
    paths. Nodes are matched by the Frames from root to node; rows for nodes
    a profile lacked are null. Union siblings keep first-seen order.
    """
    pfs = list(pfs)
    if len(pfs) < 2:
        raise InvalidArity(f"unification needs at least 2 profiles, got {len(pfs)}")
    for pf in pfs:
        if not pf.graph.is_tree:
            raise NotATree(f"profile {pf.exec_id!r} is not a calling context tree")

    frames: List[Frame] = []
    parents: List[int] = []
    levels: List[Dict[Frame, List[int]]] = []
    roots: Dict[Frame, List[int]] = {}
    mappings = []
    for pf in pfs:
        graph = pf.graph
        mapping = np.empty(len(graph), dtype=np.int64)
        # k-th sibling with a given Frame matches the k-th one in the union
        seen: Dict[Tuple[int, Frame], int] = {}
        for node in graph.traverse():
            caller = graph.parents_of(node)
            parent = int(mapping[caller[0]]) if caller else -1
            level = levels[parent] if caller else roots
            frame = graph.frame(node)
            occurrence = seen.get((parent, frame), 0)
            seen[(parent, frame)] = occurrence + 1
            slots = level.setdefault(frame, [])
            if occurrence == len(slots):
                slots.append(len(frames))
                frames.append(frame)
                parents.append(parent)
                levels.append({})
            mapping[node] = slots[occurrence]
        mappings.append(mapping)

    union, order = CallGraph.from_parents(frames, parents)
    renumber = np.empty(len(order), dtype=np.int64)
    renumber[np.asarray(order, dtype=np.int64)] = np.arange(len(order))

    for pf, mapping in zip(pfs, mappings):
        old_nodes = pf.dataframe.index.get_level_values("node").to_numpy()
        ranks = pf.dataframe.index.get_level_values("rank").to_numpy()
        table = pf.dataframe.copy()
        table.index = pd.MultiIndex.from_arrays([renumber[mapping[old_nodes]], ranks], names=INDEX_NAMES)
        pf.graph = union
        pf.dataframe = table.reindex(full_index(len(union), pf.num_ranks))

    logger.info(f"[MULTIRUN] Unified {len(pfs)} profiles into {len(union)} call paths")
    return union


def path_labels(graph: CallGraph) -> List[str]:
    return [PATH_SEPARATOR.join(str(frame) for frame in graph.path_of(node)) for node in range(len(graph))]


def _run_label(pf: ProfileFrame, index: str) -> Any:
    if index == "exec_id":
        return pf.exec_id
    if index == "num_ranks":
        return pf.num_ranks
    if index in pf.metadata:
        return pf.metadata[index]
    raise SchemaError(f"run {pf.exec_id!r} has no metadata key {index!r}", index)


def multirun_analysis(pfs: Sequence[ProfileFrame], metric: Optional[str] = None, index: str = "exec_id",
                      columns="name", threshold: Optional[float] = None, sort_runs: bool = False) -> PivotTable:
    """
    Pivot table of ``metric`` summed over nodes and ranks per function (or
    file), one row per run.

    A column is dropped only when no run exceeds ``threshold``. Columns are
    ordered by their value in the first run, largest first.
    """
    pfs = list(pfs)
    if not pfs:
        raise InvalidArity("multirun_analysis needs at least one profile")
    if threshold is not None and math.isnan(threshold):
        raise InvalidThreshold("threshold must be a number")
    metric = metric or Config.DEFAULT_METRIC
    key = GroupKey(columns)

    rows: Dict[Any, pd.Series] = {}
    for pf in pfs:
        if metric not in pf.metric_names:
            raise UnknownMetric(metric, pf.exec_id or None)
        label = _run_label(pf, index)
        if label in rows:
            raise DuplicateExecId(f"run label {label!r} appears more than once")
        rows[label] = flat_profile(pf, key, metric)[metric]

    order: Dict[str, None] = {}
    for series in rows.values():
        order.update(dict.fromkeys(series.index))
    table = pd.DataFrame([series.reindex(list(order)) for series in rows.values()], index=list(rows))
    table.index.name = index
    table.columns.name = key.value

    if threshold is not None:
        table = table.loc[:, (table > threshold).any(axis=0)]
    if sort_runs:
        totals = table.sum(axis=1, min_count=1)
        table = table.loc[totals.sort_values(ascending=False, kind="mergesort", na_position="last").index]

    logger.info(f"[MULTIRUN] Pivot of {metric!r}: {table.shape[0]} runs x {table.shape[1]} {key.value}s")
    return table


def variability_runs(pfs: Sequence[ProfileFrame],
                     metric: Optional[str] = None) -> Tuple[ProfileFrame, ProfileFrame, ProfileFrame]:
    """Slowest, closest-to-average and fastest runs by total ``metric``"""
    pfs = list(pfs)
    if not pfs:
        raise InvalidArity("variability_runs needs at least one profile")
    metric = metric or Config.DEFAULT_METRIC
    totals = []
    for pf in pfs:
        if metric not in pf.metric_names:
            raise UnknownMetric(metric, pf.exec_id or None)
        totals.append(float(np.nansum(pf.dataframe[metric].to_numpy())))

    totals = np.asarray(totals)
    slowest = int(np.argmax(totals))
    fastest = int(np.argmin(totals))
    average = int(np.argmin(np.abs(totals - totals.mean())))
    logger.info(f"[MULTIRUN] Variability: slowest={pfs[slowest].exec_id!r}, "
                f"average={pfs[average].exec_id!r}, fastest={pfs[fastest].exec_id!r}")
    return pfs[slowest], pfs[average], pfs[fastest]


def unified_table(pfs: Sequence[ProfileFrame], metric: Optional[str] = None, rank_agg: str = "sum") -> pd.DataFrame:
    """
    Union call paths (rows) against runs (columns) of the rank-aggregated
    metric; null where a run lacks the path. Inputs are left untouched.
    """
    copies = [pf.copy() for pf in pfs]
    if len(copies) < 2:
        raise InvalidArity(f"unification needs at least 2 profiles, got {len(copies)}")
    labels = [pf.exec_id for pf in copies]
    if len(set(labels)) != len(labels):
        raise DuplicateExecId(f"exec_ids must be distinct, got {labels}")

    metric = metric or copies[0].default_metric
    union = unify_multiple_graphframes(copies)
    table = copies[0].node_labels()
    table.insert(0, "path", path_labels(union))
    for pf in copies:
        table[pf.exec_id] = aggregate_over_ranks(pf, metric, rank_agg).to_numpy()
    return table
