import numpy as np
import pytest

from src.analysis import load_imbalance, rank_histograms, rank_percentiles, top_ranks
from src.ingest import from_literal
from src.profile import CallGraph, Frame, ProfileFrame
from src.profile.synthetic import imbalanced_profile
from src.utils.errors import InvalidThreshold, UnknownMetric
from tests.conftest import node


def one_node(values):
    graph = CallGraph([Frame("f")], [[]], [0])
    return ProfileFrame.from_arrays(graph, {"time": np.asarray([values], dtype=float)})


def test_max_over_mean():
    result = load_imbalance(one_node([1, 2, 3, 6]))
    assert result.imbalance.iloc[0] == pytest.approx(2.0)
    assert result.dataframe["time.max"].iloc[0] == 6.0
    assert result.dataframe["time.mean"].iloc[0] == 3.0


def test_balanced_node():
    assert load_imbalance(one_node([4, 4, 4, 4])).imbalance.iloc[0] == 1.0


def test_threshold_drops_node_before_the_ratio():
    result = load_imbalance(one_node([0.1, 0.1]), threshold=0.5)
    assert result.dataframe.empty
    assert result.diagnostics["dropped_threshold"] == 1


def test_zero_and_null_means_are_dropped():
    tree = node("main", [1.0, 3.0], [node("idle", [0.0, 0.0]), node("missing", [None, None])])
    result = load_imbalance(from_literal(tree))
    assert list(result.dataframe["name"]) == ["main"]
    assert result.diagnostics == {"dropped_null": 1, "dropped_threshold": 0, "dropped_zero_mean": 1}


@pytest.mark.parametrize("threshold", [-1.0, float("nan")])
def test_invalid_threshold(run_a, threshold):
    with pytest.raises(InvalidThreshold):
        load_imbalance(run_a, threshold=threshold)


def test_unknown_metric(run_a):
    with pytest.raises(UnknownMetric):
        load_imbalance(run_a, "flops")


def test_sorted_by_imbalance_with_labels(run_a):
    result = load_imbalance(run_a, top=2)
    assert list(result.dataframe["name"]) == ["solve", "main"]
    assert list(result.dataframe.index) == [1, 0]
    assert result.imbalance.iloc[0] == pytest.approx(4.0 / 3.0)


def test_straggler_rank_is_reported(rng):
    pf = imbalanced_profile(rng, num_ranks=128, hot_rank=39)
    result = load_imbalance(pf, "time", threshold=0.0, verbose=True)
    top = result.dataframe.iloc[0]
    assert top["name"] == "macroscopicCrossSection"
    assert top["time.ranks"][0] == 39
    assert sum(top["time.hist"]) == 128


def test_verbose_statistics_suite(rng):
    for _ in range(1000):
        ranks = int(rng.integers(1, 40))
        values = rng.uniform(0.1, 100.0, size=ranks)
        if ranks > 2:
            values[rng.random(ranks) < 0.1] = np.nan
        if np.isnan(values).all():
            continue
        result = load_imbalance(one_node(values), verbose=True)
        row = result.dataframe.iloc[0]

        expected = np.nanmax(values) / np.nanmean(values)
        assert row["time.imbalance"] == pytest.approx(expected, rel=1e-12)
        assert all(a <= b for a, b in zip(row["time.percentiles"], row["time.percentiles"][1:]))
        assert sum(row["time.hist"]) == int((~np.isnan(values)).sum())
        assert len(row["time.ranks"]) == min(5, int((~np.isnan(values)).sum()))

        shuffled = values[rng.permutation(ranks)]
        permuted = load_imbalance(one_node(shuffled), verbose=True).dataframe.iloc[0]
        assert permuted["time.imbalance"] == row["time.imbalance"]
        assert permuted["time.percentiles"] == row["time.percentiles"]
        assert permuted["time.hist"] == row["time.hist"]


def test_top_ranks_breaks_ties_by_rank():
    values = np.array([[3.0, 5.0, 5.0, np.nan, 1.0, 2.0, 0.5]])
    assert top_ranks(values) == [[1, 2, 0, 5, 4]]


def test_percentiles_use_linear_interpolation():
    assert rank_percentiles(np.array([[1.0, 2.0, 3.0, 4.0, 5.0]]))[0].tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    assert rank_percentiles(np.array([[0.0, 10.0]]))[0].tolist() == [0.0, 2.5, 5.0, 7.5, 10.0]


def test_histogram_edges():
    counts = rank_histograms(np.array([[0.0, 1.0, 10.0, 10.0], [2.0, 2.0, 2.0, np.nan]]))
    assert counts[0].tolist() == [1, 1, 0, 0, 0, 0, 0, 0, 0, 2]
    assert counts[1].tolist() == [3, 0, 0, 0, 0, 0, 0, 0, 0, 0]


@pytest.mark.parametrize("values", [[0.1, 0.1, 0.1], [0.7] * 7, [1e-300, 1e-300, 1e-300]])
def test_flat_rows_are_exactly_balanced(values):
    assert load_imbalance(one_node(values)).imbalance.iloc[0] == 1.0


def test_imbalance_is_at_least_one(rng):
    for _ in range(500):
        ranks = int(rng.integers(1, 30))
        values = np.full(ranks, rng.uniform(0.01, 10.0)) if rng.random() < 0.3 else rng.uniform(0.01, 10.0, ranks)
        assert load_imbalance(one_node(values)).imbalance.iloc[0] >= 1.0


def test_scaling_ranks_scales_max_and_mean(rng):
    for _ in range(200):
        values = rng.uniform(0.1, 50.0, size=int(rng.integers(1, 20)))
        c = float(rng.uniform(0.01, 100.0))
        plain = load_imbalance(one_node(values)).dataframe.iloc[0]
        scaled = load_imbalance(one_node(values * c)).dataframe.iloc[0]
        assert scaled["time.max"] == pytest.approx(c * plain["time.max"], rel=1e-12)
        assert scaled["time.mean"] == pytest.approx(c * plain["time.mean"], rel=1e-12)
        assert scaled["time.imbalance"] == pytest.approx(plain["time.imbalance"], rel=1e-12)


def test_top_must_be_positive(run_a):
    with pytest.raises(InvalidThreshold):
        load_imbalance(run_a, top=0)
