"""
Synthetic profiles for tests, benchmarks and the CLI cookbook.

Every generator takes a numpy Generator so results are reproducible.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import CallGraph, Frame
from .profile_frame import ProfileFrame, inclusive_from_exclusive

NAME_POOL = ("main", "solve", "compute", "exchange", "MPI_Allreduce", "MPI_Wait", "io", "setup")

# (name, exclusive time, children) of a LULESH-shaped run whose hot node is
# CalcEnergyForElems
LULESH_TREE = (
    "main", 2.0, [
        ("LagrangeLeapFrog", 1.0, [
            ("LagrangeNodal", 5.0, [
                ("CalcForceForNodes", 3.0, [
                    ("CalcVolumeForceForElems", 20.0, []),
                ]),
            ]),
            ("LagrangeElements", 2.0, [
                ("CalcLagrangeElements", 4.0, []),
                ("CalcQForElems", 6.0, []),
                ("ApplyMaterialPropertiesForElems", 1.0, [
                    ("EvalEOSForElems", 3.0, [
                        ("CalcEnergyForElems", 30.0, [
                            ("CalcPressureForElems", 10.0, []),
                        ]),
                    ]),
                ]),
            ]),
            ("CalcTimeConstraintsForElems", 2.0, []),
        ]),
        ("MPI_Allreduce", 3.0, []),
    ],
)

QUICKSILVER_TREE = (
    "main", 1.0, [
        ("cycleInit", 2.0, []),
        ("cycleTracking", 1.0, [
            ("CycleTrackingGuts", 2.0, [
                ("CollisionEvent", 3.0, [
                    ("macroscopicCrossSection", 6.0, []),
                ]),
                ("MCT_Nearest_Facet", 4.0, []),
            ]),
            ("MPI_Testsome", 1.0, []),
        ]),
        ("cycleFinalize", 1.0, []),
    ],
)


def _flatten(tree) -> Tuple[List[Frame], List[int], List[float]]:
    frames, parents, values = [], [], []
    stack = [(tree, -1)]
    while stack:
        (name, exclusive, children), parent = stack.pop()
        index = len(frames)
        frames.append(Frame(name))
        parents.append(parent)
        values.append(exclusive)
        for child in reversed(children):
            stack.append((child, index))
    return frames, parents, values


def random_cct(rng: np.random.Generator, max_nodes: int = 12, num_ranks: int = 1,
               metrics: Sequence[str] = ("time",), names: Sequence[str] = NAME_POOL,
               forest_prob: float = 0.15, null_prob: float = 0.0, inclusive: bool = True,
               distinct_siblings: bool = True, exec_id: str = "random") -> ProfileFrame:
    """Random CCT with positive exclusive values and, optionally, derived inclusive columns"""
    size = int(rng.integers(1, max_nodes + 1))
    parents = [-1]
    for index in range(1, size):
        parents.append(-1 if rng.random() < forest_prob else int(rng.integers(0, index)))

    sibling_names: Dict[int, set] = {}
    frames = []
    for index, parent in enumerate(parents):
        used = sibling_names.setdefault(parent, set())
        pool = [n for n in names if n not in used] if distinct_siblings else list(names)
        name = str(rng.choice(pool)) if pool else f"{names[0]}_{index}"
        used.add(name)
        frames.append(Frame(name))

    graph, order = CallGraph.from_parents(frames, parents)
    arrays = {}
    for metric in metrics:
        values = rng.uniform(1.0, 100.0, size=(size, num_ranks))
        if null_prob:
            values[rng.random(size=values.shape) < null_prob] = np.nan
        arrays[metric] = values[order]

    pf = ProfileFrame.from_arrays(graph, arrays, exec_id=exec_id)
    if inclusive:
        for metric in metrics:
            pf = inclusive_from_exclusive(pf, metric)
    return pf


def tree_profile(tree, num_ranks: int = 1, scale: float = 1.0, exec_id: str = "profile",
                 rank_weights: Optional[np.ndarray] = None, metric: str = "time") -> ProfileFrame:
    """Profile of a (name, exclusive, children) tuple tree; ranks share the value unless weighted"""
    frames, parents, values = _flatten(tree)
    graph, order = CallGraph.from_parents(frames, parents)
    base = np.asarray(values, dtype=np.float64)[order] * scale
    weights = np.ones(num_ranks) if rank_weights is None else np.asarray(rank_weights, dtype=np.float64)
    pf = ProfileFrame.from_arrays(graph, {metric: np.outer(base, weights)}, exec_id=exec_id,
                                  metadata={"process_count": num_ranks})
    return inclusive_from_exclusive(pf, metric)


def scaling_series(process_counts: Sequence[int], strong: bool = True, tree=LULESH_TREE,
                   prefix: str = "lulesh", ranks_per_profile: Optional[int] = None) -> List[ProfileFrame]:
    """
    Perfectly scaling runs: strong scaling divides the baseline time by n/s,
    weak scaling keeps it constant.
    """
    counts = sorted(process_counts)
    baseline = counts[0]
    runs = []
    for count in process_counts:
        scale = baseline / count if strong else 1.0
        ranks = ranks_per_profile or count
        pf = tree_profile(tree, num_ranks=ranks, scale=scale, exec_id=f"{prefix}-{count}")
        pf.metadata["process_count"] = count
        runs.append(pf)
    return runs


def imbalanced_profile(rng: np.random.Generator, num_ranks: int = 128, hot_rank: int = 39,
                       tree=QUICKSILVER_TREE, hot_node: str = "macroscopicCrossSection",
                       exec_id: str = "quicksilver-128") -> ProfileFrame:
    """Quicksilver-shaped run where one node carries a heavy straggler rank"""
    frames, parents, values = _flatten(tree)
    graph, order = CallGraph.from_parents(frames, parents)
    base = np.asarray(values, dtype=np.float64)[order]
    noise = rng.uniform(0.9, 1.1, size=(len(graph), num_ranks))
    matrix = base[:, None] * noise
    for node, frame in enumerate(graph.frames):
        if frame.name == hot_node:
            matrix[node, hot_rank] *= 6.0
    pf = ProfileFrame.from_arrays(graph, {"time": matrix}, exec_id=exec_id)
    return inclusive_from_exclusive(pf, "time")


def large_profile(rng: np.random.Generator, rows: int, num_ranks: int = 8,
                  exec_id: str = "large") -> ProfileFrame:
    """About ``rows`` metric rows over a random tree, for runtime measurements"""
    size = max(1, rows // num_ranks)
    parents = np.empty(size, dtype=np.int64)
    parents[0] = -1
    if size > 1:
        parents[1:] = np.floor(rng.random(size - 1) * np.arange(1, size)).astype(np.int64)
    frames = [Frame(f"f{index % 997}") for index in range(size)]
    graph, order = CallGraph.from_parents(frames, parents.tolist())
    values = rng.uniform(1.0, 10.0, size=(size, num_ranks))[order]
    pf = ProfileFrame.from_arrays(graph, {"time": values}, exec_id=exec_id)
    return inclusive_from_exclusive(pf, "time")
