import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from src.analysis import (
    correlation_analysis,
    filter_correlation_matrix,
    flat_profile,
    hot_path,
    load_imbalance,
    multirun_analysis,
    pairwise_correlation,
    resolve_inclusive,
    speedup_efficiency,
    to_callgraph,
    unified_table,
)
from src.ingest import construct_from
from src.profile import ProfileFrame, aggregate_over_ranks
from src.utils.config import Config
from src.utils.errors import ChopperError, UnknownNode
from src.utils.logger import setup_logging
from .render import RenderOptions, TableFormat, emit_table, render_tree, table_rows

logger = logging.getLogger(__name__)


class ChopArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1, like every other user error"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", default=None, help="metric column (default: the profile's default metric)")
    common.add_argument("--threshold", type=float, default=None, help="drop nodes/columns at or below this value")
    common.add_argument("--stop-pct", type=float, default=Config.STOP_PCT, help="hot path stopping fraction")
    common.add_argument("--verbose", action="store_true", help="per-rank statistics in imbalance output")
    common.add_argument("--format", choices=[f.value for f in TableFormat], default=TableFormat.TTY.value)
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--no-color", action="store_true", help="never emit escape sequences")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None,
                        help="override CHOPPER_LOG_LEVEL")
    return common


def build_parser() -> ChopArgumentParser:
    common = _common_flags()
    parser = ChopArgumentParser(prog="chop", description="Analyze calling context tree profiles of parallel programs.")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ChopArgumentParser)

    def single(name, help_text):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("profile", help="canonical JSON profile")
        return sub

    def multiple(name, help_text):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("profiles", nargs="+", help="canonical JSON profiles, one per run")
        return sub

    single("callgraph", "merge the CCT into a call graph by function name")

    flat = single("flat", "metric totals per function or file")
    flat.add_argument("--groupby", choices=["name", "file"], default="name")

    imbalance = single("imbalance", "max/mean of the metric across ranks per node")
    imbalance.add_argument("--top", type=positive_int, default=None, help="keep the N most imbalanced nodes")

    hotpath = single("hotpath", "follow the heaviest children from a start node")
    hotpath.add_argument("--start", default=None, help="function name to start from (first match)")
    hotpath.add_argument("--rank-agg", choices=["sum", "mean", "max", "min"], default=Config.RANK_AGG)

    corr = single("corr", "correlation matrix between metrics")
    corr.add_argument("--metrics", nargs="+", default=None)
    corr.add_argument("--method", choices=["pearson", "spearman", "kendall"], default="pearson")
    corr.add_argument("--min-abs", type=float, default=None, help="null coefficients with |r| below this")

    pairwise = single("pairwise", "least-squares fit of one metric against another")
    pairwise.add_argument("--x", required=True, dest="metric_x")
    pairwise.add_argument("--y", required=True, dest="metric_y")

    unify = multiple("unify", "union call paths of several runs side by side")
    unify.add_argument("--rank-agg", choices=["sum", "mean", "max", "min"], default=Config.RANK_AGG)

    pivot = multiple("pivot", "runs x functions pivot table")
    pivot.add_argument("--columns", choices=["name", "file"], default="name")
    pivot.add_argument("--index", default="exec_id", help="run label: exec_id, num_ranks or a metadata key")
    pivot.add_argument("--sort-runs", action="store_true", help="order runs from slowest to fastest")

    scaling = multiple("scaling", "per-node speedup or efficiency against the smallest run")
    mode = scaling.add_mutually_exclusive_group()
    mode.add_argument("--strong", dest="strong", action="store_true", default=True)
    mode.add_argument("--weak", dest="strong", action="store_false")
    kind = scaling.add_mutually_exclusive_group()
    kind.add_argument("--efficiency", dest="efficiency", action="store_true", default=True)
    kind.add_argument("--speedup", dest="efficiency", action="store_false")
    scaling.add_argument("--process-counts", nargs="+", type=int, default=None)
    scaling.add_argument("--rank-agg", choices=["sum", "mean", "max", "min"], default=Config.SCALING_AGG)

    render = single("render", "draw the tree with metric values")
    render.add_argument("--depth", type=int, default=None, help="print at most this many levels")
    render.add_argument("--hot-path", action="store_true", help="mark the hot path")
    render.add_argument("--rank-agg", choices=["sum", "mean", "max", "min"], default=Config.RANK_AGG)

    return parser


def _load(args) -> List[ProfileFrame]:
    sources = [args.profile] if hasattr(args, "profile") else list(args.profiles)
    return construct_from(sources)


def _start_node(pf: ProfileFrame, name: Optional[str]):
    if name is None:
        return None
    matches = pf.find_nodes(name)
    if not matches:
        raise UnknownNode(f"No node named {name!r} in {pf.exec_id!r}")
    return matches[0]


def _hotpath_table(pf: ProfileFrame, args) -> pd.DataFrame:
    path = hot_path(pf, args.metric, args.stop_pct, _start_node(pf, args.start), args.rank_agg)
    resolved, column = resolve_inclusive(pf, args.metric or pf.default_metric)
    values = aggregate_over_ranks(resolved, column, args.rank_agg).to_numpy()[path]
    table = pf.node_labels().iloc[path].copy()
    table.insert(0, "depth", pf.graph.depth_array[path])
    table[column] = values
    with np.errstate(divide="ignore", invalid="ignore"):
        table["share"] = np.concatenate([[np.nan], values[1:] / values[:-1]])
    return table


def _callgraph_table(merged: ProfileFrame, metric: str) -> pd.DataFrame:
    table = merged.node_labels()
    table[metric] = aggregate_over_ranks(merged, metric, "sum").to_numpy()
    graph = merged.graph
    table["callees"] = pd.Series([[graph.frame(c).name for c in graph.children_of(n)] for n in range(len(graph))],
                                 index=table.index, dtype=object)
    return table


def run(args, color: bool) -> str:
    fmt = TableFormat(args.format)
    pfs = _load(args)
    pf = pfs[0]
    command = args.command

    if command == "callgraph":
        merged = to_callgraph(pf)
        if fmt is TableFormat.TTY:
            return render_tree(merged, RenderOptions(args.metric, color=color, rank_agg="sum"))
        return emit_table(_callgraph_table(merged, args.metric or merged.default_metric), fmt)

    if command == "flat":
        return emit_table(flat_profile(pf, args.groupby, args.metric), fmt)

    if command == "imbalance":
        result = load_imbalance(pf, args.metric, args.threshold, args.verbose, args.top)
        return emit_table(result.dataframe, fmt)

    if command == "hotpath":
        return emit_table(_hotpath_table(pf, args), fmt)

    if command == "corr":
        matrix = correlation_analysis(pf, args.metrics, args.method)
        if args.min_abs is not None:
            matrix = filter_correlation_matrix(matrix, args.min_abs)
        return emit_table(matrix.values, fmt)

    if command == "pairwise":
        fit = pairwise_correlation(pf, args.metric_x, args.metric_y)
        if fmt is TableFormat.JSON:
            document = {"slope": fit.slope, "intercept": fit.intercept, "rvalue": fit.rvalue,
                        "nodes": table_rows(fit.dataframe)}
            return json.dumps(document, indent=1, ensure_ascii=False) + "\n"
        body = emit_table(fit.outliers(), fmt)
        if fmt is TableFormat.TTY:
            return f"slope={fit.slope:.{Config.PRECISION}f} intercept={fit.intercept:.{Config.PRECISION}f} " \
                   f"r={fit.rvalue:.{Config.PRECISION}f}\n" + body
        return body

    if command == "unify":
        return emit_table(unified_table(pfs, args.metric, args.rank_agg), fmt)

    if command == "pivot":
        table = multirun_analysis(pfs, args.metric, args.index, args.columns, args.threshold, args.sort_runs)
        return emit_table(table, fmt)

    if command == "scaling":
        table = speedup_efficiency(pfs, args.metric, args.strong, args.efficiency, args.process_counts,
                                   args.threshold, args.rank_agg)
        return emit_table(table, fmt)

    if command == "render":
        highlight = hot_path(pf, args.metric, args.stop_pct, rank_agg=args.rank_agg) if args.hot_path else []
        return render_tree(pf, RenderOptions(args.metric, args.depth, highlight, color, rank_agg=args.rank_agg))

    raise ChopperError(f"Unknown subcommand {command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the `chop` command; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1

    try:
        setup_logging(args.log_level)
    except (ValueError, OSError) as e:
        print(f"chop {args.command}: error: cannot set up logging: {e}", file=sys.stderr)
        return 1
    color = not args.no_color and args.output is None and sys.stdout.isatty()
    try:
        text = run(args, color)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            logger.info(f"[CLI] Wrote {args.command} output to {args.output}")
        else:
            sys.stdout.write(text)
        return 0
    except (ChopperError, OSError) as e:
        logger.debug(f"[CLI] {args.command} failed: {e!r}")
        print(f"chop {args.command}: error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"[CLI] Internal error in {args.command}: {e}")
        return 2
