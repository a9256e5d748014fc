import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from src.profile.profile_frame import ProfileFrame, aggregate_over_ranks
from src.utils.config import Config
from src.utils.errors import InvalidArity, InvalidThreshold, UnsupportedCombination
from .hot_path import resolve_inclusive
from .multirun import path_labels, unify_multiple_graphframes

logger = logging.getLogger(__name__)


@dataclass
class ScalingRun:
    pf: ProfileFrame
    process_count: int
    baseline: bool = False


def scaling_runs(pfs: Sequence[ProfileFrame], process_counts: Optional[Sequence[int]] = None) -> List[ScalingRun]:
    """
    Pair every profile with its process count. Without explicit counts the
    ``process_count`` metadata entry is used, falling back to num_ranks.
    The smallest count is the baseline.
    """
    pfs = list(pfs)
    if len(pfs) < 2:
        raise InvalidArity(f"scaling needs at least 2 runs, got {len(pfs)}")
    if process_counts is None:
        counts = [int(pf.metadata.get("process_count", pf.num_ranks)) for pf in pfs]
    else:
        counts = [int(count) for count in process_counts]
        if len(counts) != len(pfs):
            raise InvalidArity(f"got {len(counts)} process counts for {len(pfs)} runs")
    if any(count < 1 for count in counts):
        raise InvalidArity(f"process counts must be positive, got {counts}")
    if len(set(counts)) != len(counts):
        raise InvalidArity(f"process counts must be distinct, got {counts}")

    smallest = min(counts)
    runs = [ScalingRun(pf, count, count == smallest) for pf, count in zip(pfs, counts)]
    return sorted(runs, key=lambda run: run.process_count)


def speedup_efficiency(pfs: Sequence[ProfileFrame], metric: Optional[str] = None, strong: bool = True,
                       efficiency: bool = True, process_counts: Optional[Sequence[int]] = None,
                       threshold: Optional[float] = None, rank_agg: str = Config.SCALING_AGG) -> pd.DataFrame:
    """
    Per-node speedup or efficiency of every run against the run with the
    fewest processes.

    With baseline count s and time t_s, a run on n processes with time t_n
    scores t_s / t_n for speedup and weak efficiency, and
    s * t_s / (n * t_n) for strong efficiency. Weak speedup is not defined.
    Cells are null when either time is null or t_n is zero. Nodes whose
    baseline time is not above ``threshold`` are dropped.
    """
    if not strong and not efficiency:
        raise UnsupportedCombination("speedup is only defined for strong scaling")
    if threshold is not None and math.isnan(threshold):
        raise InvalidThreshold("threshold must be a number")
    runs = scaling_runs(pfs, process_counts)

    copies = [run.pf.copy() for run in runs]
    union = unify_multiple_graphframes(copies)
    metric = metric or copies[0].default_metric

    times = []
    for pf in copies:
        pf, column = resolve_inclusive(pf, metric)
        times.append(aggregate_over_ranks(pf, column, rank_agg).to_numpy())

    base = next(i for i, run in enumerate(runs) if run.baseline)
    s, t_s = runs[base].process_count, times[base]

    table = copies[0].node_labels()
    table.insert(0, "path", path_labels(union))
    for run, t_n in zip(runs, times):
        n = run.process_count
        with np.errstate(divide="ignore", invalid="ignore"):
            if strong and efficiency:
                score = (s * t_s) / (n * t_n)
            else:
                score = t_s / t_n
        table[n] = np.where(t_n == 0, np.nan, score)

    if threshold is not None:
        table = table[t_s > threshold]

    kind = ("strong" if strong else "weak") + (" efficiency" if efficiency else " speedup")
    logger.info(f"[MULTIRUN] {kind.capitalize()} over {len(runs)} runs, baseline {s} processes, "
                f"{len(table)} call paths")
    return table
