import logging
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.profile.graph import CallGraph, Frame
from src.profile.profile_frame import INDEX_NAMES, ProfileFrame, aggregate_over_ranks
from src.utils.errors import NotATree

logger = logging.getLogger(__name__)

UNKNOWN_FILE = "<unknown>"


class GroupKey(str, Enum):
    NAME = "name"
    FILE = "file"


def group_labels(pf: ProfileFrame, groupby="name") -> List[str]:
    """Group label of every node, indexed by NodeId"""
    key = GroupKey(groupby)
    if key is GroupKey.NAME:
        return [frame.name for frame in pf.graph.frames]
    return [frame.file if frame.file is not None else UNKNOWN_FILE for frame in pf.graph.frames]


def to_callgraph(pf: ProfileFrame) -> ProfileFrame:
    """
    Merge every CCT node sharing a function name into one call-graph node,
    summing metrics per rank. Recursion becomes a self- or back-edge.
    """
    if not pf.graph.is_tree:
        raise NotATree("to_callgraph expects a calling context tree")
    graph = pf.graph

    group_of: Dict[str, int] = {}
    members: List[List[Frame]] = []
    mapping = np.empty(len(graph), dtype=np.int64)
    for node in graph.traverse():
        frame = graph.frame(node)
        if frame.name not in group_of:
            group_of[frame.name] = len(members)
            members.append([])
        mapping[node] = group_of[frame.name]
        members[mapping[node]].append(frame)

    # keep file/line only when every merged node agrees on them
    frames = [group[0] if all(f == group[0] for f in group) else Frame(group[0].name) for group in members]

    children: List[Dict[int, None]] = [{} for _ in frames]
    for parent, child in graph.edges():
        children[mapping[parent]][int(mapping[child])] = None
    roots = list(dict.fromkeys(int(mapping[root]) for root in graph.roots))
    merged_graph = CallGraph(frames, [list(kids) for kids in children], roots, is_tree=False)

    codes = mapping[pf.dataframe.index.get_level_values("node").to_numpy()]
    ranks = pf.dataframe.index.get_level_values("rank").to_numpy()
    merged = pf.dataframe.groupby([codes, ranks]).sum(min_count=1)
    merged.index = merged.index.set_names(INDEX_NAMES)

    logger.info(f"[ANALYSIS] Call graph of {pf.exec_id or 'profile'}: {len(graph)} CCT nodes -> "
                f"{len(merged_graph)} functions")
    return ProfileFrame(merged_graph, merged, pf.num_ranks, pf.exec_id, pf.default_metric, pf.metadata)


def flat_profile(pf: ProfileFrame, groupby="name", metric: Optional[str] = None) -> pd.DataFrame:
    """Metric summed over nodes and ranks per function (or file), largest first"""
    metric = metric or pf.default_metric
    key = GroupKey(groupby)
    per_node = aggregate_over_ranks(pf, metric, "sum")
    labels = pd.Index(group_labels(pf, key), name=key.value)

    table = (
        pd.Series(per_node.to_numpy(), index=labels, name=metric)
        .groupby(level=0, sort=False)
        .sum(min_count=1)
        .sort_values(ascending=False, kind="mergesort", na_position="last")
        .to_frame()
    )
    return table
