import logging
import math
from typing import List, Optional, Tuple

from src.profile.graph import NodeId
from src.profile.profile_frame import (
    ProfileFrame,
    aggregate_over_ranks,
    exclusive_name,
    inclusive_from_exclusive,
    inclusive_name,
)
from src.utils.config import Config
from src.utils.errors import InvalidThreshold, UnknownMetric

logger = logging.getLogger(__name__)


def resolve_inclusive(pf: ProfileFrame, metric: str) -> Tuple[ProfileFrame, str]:
    """
    Pick the inclusive column for ``metric``: "metric (inc)" when present,
    derived from the exclusive column on a CCT otherwise, and the column
    itself as a last resort (merged graphs cannot derive).
    """
    inclusive = inclusive_name(metric)
    if inclusive in pf.metric_names:
        return pf, inclusive
    base = exclusive_name(metric)
    if base in pf.metric_names and pf.graph.is_tree:
        logger.info(f"[ANALYSIS] Deriving {inclusive!r} from {base!r}")
        return inclusive_from_exclusive(pf, base), inclusive
    if metric in pf.metric_names:
        return pf, metric
    raise UnknownMetric(metric, pf.exec_id or None)


def hot_path(pf: ProfileFrame, metric: Optional[str] = None, stop_pct: float = Config.STOP_PCT,
             start: Optional[NodeId] = None, rank_agg: str = Config.RANK_AGG) -> List[NodeId]:
    """
    Follow the heaviest child while it holds more than ``stop_pct`` of its
    parent's inclusive value. Returns the nodes from ``start`` (default: the
    heaviest root) down to the hot node.

    Ranks are aggregated with ``rank_agg`` first; ties between children go to
    the one visited first.
    """
    if not 0 < stop_pct <= 1:
        raise InvalidThreshold(f"stop_pct must be in (0, 1], got {stop_pct}")
    pf, column = resolve_inclusive(pf, metric or pf.default_metric)
    values = aggregate_over_ranks(pf, column, rank_agg).to_numpy()
    graph = pf.graph

    if start is None:
        weighted = [root for root in graph.roots if not math.isnan(values[root])]
        start = max(weighted, key=lambda root: values[root]) if weighted else graph.roots[0]
    else:
        graph.frame(start)

    path = [start]
    seen = {start}
    node = start
    while True:
        parent_value = values[node]
        if math.isnan(parent_value) or parent_value == 0:
            break
        best = None
        for child in graph.children_of(node):
            if child in seen or math.isnan(values[child]):
                continue
            if best is None or values[child] > values[best]:
                best = child
        if best is None or not values[best] > stop_pct * parent_value:
            break
        path.append(best)
        seen.add(best)
        node = best

    logger.info(f"[ANALYSIS] Hot path on {column!r}: {len(path)} nodes, hot node "
                f"{graph.frame(path[-1]).name}")
    return path
