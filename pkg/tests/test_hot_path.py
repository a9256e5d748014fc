import time

import numpy as np
import pytest

from src.analysis import hot_path, to_callgraph
from src.ingest import from_literal, read_canonical
from src.profile.synthetic import LULESH_TREE, random_cct, tree_profile
from src.utils.errors import InvalidThreshold, UnknownMetric, UnknownNode
from tests.conftest import node


def subtree_totals(pf):
    """Rank-summed inclusive time by explicit recursion over the exclusive column"""
    exclusive = np.nansum(pf.matrix("time"), axis=1)
    graph = pf.graph

    def total(n):
        return exclusive[n] + sum(total(child) for child in graph.children_of(n))

    return [total(n) for n in range(len(graph))]


def oracle_hot_path(pf, stop_pct=0.5):
    """Check every root-to-node chain from the heaviest root against the stopping rule"""
    graph = pf.graph
    values = subtree_totals(pf)
    start = max(graph.roots, key=lambda root: values[root])

    def heaviest_child(n):
        children = graph.children_of(n)
        return max(children, key=lambda child: values[child]) if children else None

    def follows_rule(parent, child):
        return child == heaviest_child(parent) and values[child] > stop_pct * values[parent]

    chains = []
    stack = [[start]]
    while stack:
        chain = stack.pop()
        chains.append(chain)
        stack.extend(chain + [child] for child in graph.children_of(chain[-1]))

    matches = []
    for chain in chains:
        steps_ok = all(follows_rule(a, b) for a, b in zip(chain, chain[1:]))
        last_best = heaviest_child(chain[-1])
        maximal = last_best is None or not follows_rule(chain[-1], last_best)
        if steps_ok and maximal:
            matches.append(chain)
    assert len(matches) == 1
    return matches[0]


def test_matches_brute_force_oracle(rng):
    started = time.perf_counter()
    for _ in range(500):
        pf = random_cct(rng, max_nodes=12, num_ranks=int(rng.integers(1, 3)))
        assert hot_path(pf, "time (inc)") == oracle_hot_path(pf)
    assert time.perf_counter() - started < 5.0


def test_lulesh_hot_node():
    pf = tree_profile(LULESH_TREE, num_ranks=4)
    names = [pf.graph.frame(n).name for n in hot_path(pf, "time (inc)")]
    assert names == ["main", "LagrangeLeapFrog", "LagrangeElements", "ApplyMaterialPropertiesForElems",
                     "EvalEOSForElems", "CalcEnergyForElems"]


def test_exclusive_metric_resolves_to_inclusive():
    pf = tree_profile(LULESH_TREE)
    assert hot_path(pf, "time") == hot_path(pf, "time (inc)")


def test_inclusive_column_is_derived_when_missing():
    tree = node("main", 1.0, [node("solve", 8.0, [node("leaf", 1.0)]), node("io", 1.0)])
    path = hot_path(from_literal(tree), "time")
    assert path == [0, 1]


def test_child_at_exactly_half_stops():
    tree = node("main", 5.0, [node("solve", 5.0)])
    assert hot_path(from_literal(tree), "time") == [0]


def test_zero_start_returns_start():
    tree = node("main", 0.0, [node("idle", 0.0)])
    assert hot_path(from_literal(tree), "time") == [0]


def test_ties_go_to_first_child():
    tree = node("main", 0.0, [node("a", 6.0), node("b", 6.0)])
    pf = from_literal(tree)
    assert hot_path(pf, "time", stop_pct=0.4) == [0, 1]


def test_explicit_start(run_a):
    assert hot_path(run_a, start=1) == [1]
    assert hot_path(run_a, start=1, stop_pct=0.4) == [1, 2]


def test_stop_pct_bounds(run_a):
    for bad in (0.0, 1.5, -0.1):
        with pytest.raises(InvalidThreshold):
            hot_path(run_a, stop_pct=bad)


def test_unknown_start(run_a):
    with pytest.raises(UnknownNode):
        hot_path(run_a, start=42)


def test_unknown_metric(run_a):
    with pytest.raises(UnknownMetric):
        hot_path(run_a, "flops")


def test_merged_graph_with_recursion_terminates(fixtures_dir):
    merged = to_callgraph(read_canonical(fixtures_dir / "merged_calls.json"))
    path = hot_path(merged, "time")
    assert len(path) == len(set(path))
    assert [merged.graph.frame(n).name for n in path] == ["main", "solve"]
