import io
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.text import Text

from src.profile.graph import NodeId
from src.profile.profile_frame import ProfileFrame, aggregate_over_ranks
from src.utils.config import Config
from src.utils.errors import InvalidThreshold

logger = logging.getLogger(__name__)

BRANCH = "├── "
LAST_BRANCH = "└── "
PIPE = "│   "
SPACE = "    "
HIGHLIGHT_MARKER = " *"
NULL_TEXT = "-"


class TableFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    TTY = "tty"


@dataclass
class RenderOptions:
    metric: Optional[str] = None
    depth_limit: Optional[int] = None
    highlight: Sequence[NodeId] = field(default_factory=list)
    color: bool = False
    precision: int = Config.PRECISION
    rank_agg: str = Config.RANK_AGG

    def __post_init__(self):
        if self.depth_limit is not None and self.depth_limit < 1:
            raise InvalidThreshold(f"depth limit must be >= 1, got {self.depth_limit}")


def format_value(value: float, precision: int) -> str:
    if value is None or math.isnan(value):
        return NULL_TEXT
    return f"{value:.{precision}f}"


def render_tree(pf: ProfileFrame, opts: RenderOptions) -> str:
    """
    One line per node in depth-first order: tree connectors, the node name
    and its rank-aggregated metric. Highlighted nodes end with " *" (bold red
    when color is on). Roots count as depth 1 for ``depth_limit``.
    """
    metric = opts.metric or pf.default_metric
    values = aggregate_over_ranks(pf, metric, opts.rank_agg).to_numpy()
    graph = pf.graph
    highlight = set(opts.highlight)
    lines: List[Text] = []
    seen = set()

    # (node, prefix for the node's own line, prefix for its children, depth)
    stack = [(root, "", "", 1) for root in reversed(graph.roots)]
    while stack:
        node, prefix, child_prefix, depth = stack.pop()
        if node in seen:
            continue
        seen.add(node)

        line = Text(prefix)
        label = f"{graph.frame(node).name} {format_value(values[node], opts.precision)}"
        if node in highlight:
            line.append(label + HIGHLIGHT_MARKER, style="bold red")
        else:
            line.append(label)
        lines.append(line)

        if opts.depth_limit is not None and depth >= opts.depth_limit:
            continue
        children = [child for child in graph.children_of(node) if child not in seen]
        for position in reversed(range(len(children))):
            last = position == len(children) - 1
            stack.append((
                children[position],
                child_prefix + (LAST_BRANCH if last else BRANCH),
                child_prefix + (SPACE if last else PIPE),
                depth + 1,
            ))

    if not opts.color:
        return "".join(line.plain + "\n" for line in lines)

    buffer = io.StringIO()
    console = Console(file=buffer, force_terminal=True, color_system="standard", soft_wrap=True,
                      highlight=False)
    for line in lines:
        console.print(line)
    return buffer.getvalue()


def _plain(value: Any) -> Any:
    """JSON-ready form of one table cell"""
    if value is None or value is pd.NA:
        return None
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def table_rows(table: pd.DataFrame) -> Dict[str, Dict[str, Any]]:
    """Row objects keyed by the stringified index"""
    return {
        str(_plain(label)): {str(column): _plain(value) for column, value in zip(table.columns, row)}
        for label, row in zip(table.index, table.itertuples(index=False, name=None))
    }


def _lists_as_json(table: pd.DataFrame) -> pd.DataFrame:
    table = table.copy()
    for column in table.columns:
        if table[column].dtype == object:
            table[column] = [json.dumps(_plain(v)) if isinstance(v, (list, tuple)) else v for v in table[column]]
    return table


def emit_table(table: pd.DataFrame, fmt="tty", precision: int = Config.PRECISION) -> str:
    """
    csv: RFC-4180, nulls as empty fields, full precision.
    json: object of row objects keyed by index, nulls as null.
    tty: aligned grid with ``precision`` decimals.
    """
    fmt = TableFormat(fmt)
    if fmt is TableFormat.JSON:
        return json.dumps(table_rows(table), indent=1, ensure_ascii=False) + "\n"

    table = _lists_as_json(table)
    table.columns.name = None
    if fmt is TableFormat.CSV:
        return table.to_csv(na_rep="", lineterminator="\n")
    return table.to_string(na_rep=NULL_TEXT, float_format=lambda v: f"{v:.{precision}f}") + "\n"
