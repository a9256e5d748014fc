import numpy as np
import pytest

from src.analysis import correlation_analysis, filter_correlation_matrix, pairwise_correlation
from src.profile import CallGraph, Frame, ProfileFrame
from src.utils.errors import DegenerateFit, InsufficientData, InvalidThreshold, UnknownMetric


def flat_profile_of(**metrics):
    """One root per value, one rank"""
    size = len(next(iter(metrics.values())))
    graph = CallGraph([Frame(f"f{i}") for i in range(size)], [[] for _ in range(size)], list(range(size)))
    return ProfileFrame.from_arrays(graph, {name: np.asarray(values, dtype=float)[:, None]
                                            for name, values in metrics.items()})


def test_perfect_linear_data():
    x = np.arange(10, dtype=float)
    pf = flat_profile_of(x=x, y=3 * x + 7)
    for method in ("pearson", "spearman"):
        matrix = correlation_analysis(pf, method=method)
        assert matrix.values.loc["x", "y"] == pytest.approx(1.0, abs=1e-12)
        assert matrix.values.loc["y", "x"] == pytest.approx(1.0, abs=1e-12)


def test_kendall_on_reversed_order():
    x = np.arange(6, dtype=float)
    matrix = correlation_analysis(flat_profile_of(x=x, y=-x), method="kendall")
    assert matrix.values.loc["x", "y"] == pytest.approx(-1.0)


def test_matrix_is_symmetric_with_unit_diagonal(rng):
    pf = flat_profile_of(a=rng.normal(size=30), b=rng.normal(size=30), c=rng.normal(size=30))
    values = correlation_analysis(pf).values
    assert np.allclose(values.to_numpy(), values.to_numpy().T)
    assert np.diag(values.to_numpy()).tolist() == [1.0, 1.0, 1.0]
    assert (values.abs() <= 1.0).all().all()


def test_constant_metric_gives_null_entries():
    values = correlation_analysis(flat_profile_of(x=[1.0, 2.0, 3.0], y=[5.0, 5.0, 5.0])).values
    assert np.isnan(values.loc["x", "y"])
    assert np.isnan(values.loc["y", "y"])


def test_nulls_are_dropped_pairwise():
    pf = flat_profile_of(x=[1.0, 2.0, np.nan, 4.0], y=[2.0, 4.0, 100.0, 8.0])
    assert correlation_analysis(pf).values.loc["x", "y"] == pytest.approx(1.0)


def test_needs_two_metrics_and_observations():
    with pytest.raises(InsufficientData):
        correlation_analysis(flat_profile_of(x=[1.0, 2.0]))
    with pytest.raises(InsufficientData):
        correlation_analysis(flat_profile_of(x=[1.0, np.nan], y=[1.0, 2.0]))


def test_unknown_metric():
    with pytest.raises(UnknownMetric):
        correlation_analysis(flat_profile_of(x=[1.0, 2.0], y=[2.0, 3.0]), metrics=["x", "z"])


def test_filter_keeps_strong_coefficients(rng):
    x = np.arange(20, dtype=float)
    pf = flat_profile_of(x=x, y=2 * x, noise=rng.normal(size=20))
    filtered = filter_correlation_matrix(correlation_analysis(pf), 0.9).values
    assert filtered.loc["x", "y"] == pytest.approx(1.0)
    assert filtered.loc["noise", "noise"] == 1.0
    kept = filtered.loc["x", "noise"]
    assert np.isnan(kept) or abs(kept) >= 0.9


def test_filter_bounds():
    matrix = correlation_analysis(flat_profile_of(x=[1.0, 2.0], y=[2.0, 1.0]))
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(InvalidThreshold):
            filter_correlation_matrix(matrix, bad)


def test_three_point_least_squares():
    fit = pairwise_correlation(flat_profile_of(x=[0.0, 1.0, 2.0], y=[0.0, 1.0, 4.0]), "x", "y")
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert fit.dataframe["distance"].tolist() == pytest.approx([1 / 3, -2 / 3, 1 / 3], abs=1e-12)
    assert list(fit.outliers(1)["name"]) == ["f1"]


def test_exact_line_has_zero_distances():
    fit = pairwise_correlation(flat_profile_of(x=[1.0, 2.0, 3.0], y=[3.0, 5.0, 7.0]), "x", "y")
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.rvalue == pytest.approx(1.0)
    assert np.allclose(fit.dataframe["distance"], 0.0)


def test_vertical_line_is_degenerate():
    with pytest.raises(DegenerateFit):
        pairwise_correlation(flat_profile_of(x=[2.0, 2.0, 2.0], y=[1.0, 2.0, 3.0]), "x", "y")


def test_fit_needs_two_nodes():
    with pytest.raises(InsufficientData):
        pairwise_correlation(flat_profile_of(x=[1.0, np.nan], y=[1.0, 2.0]), "x", "y")


def test_pearson_ignores_positive_affine_maps(rng):
    for _ in range(100):
        x, y = rng.normal(size=25), rng.normal(size=25)
        a, b = float(rng.uniform(0.1, 10.0)), float(rng.uniform(-50.0, 50.0))
        plain = correlation_analysis(flat_profile_of(x=x, y=y)).values.loc["x", "y"]
        mapped = correlation_analysis(flat_profile_of(x=a * x + b, y=y)).values.loc["x", "y"]
        assert mapped == pytest.approx(plain, abs=1e-9)


def test_spearman_ignores_strictly_monotone_maps(rng):
    for _ in range(100):
        x, y = rng.uniform(0.1, 5.0, size=25), rng.uniform(0.1, 5.0, size=25)
        plain = correlation_analysis(flat_profile_of(x=x, y=y), method="spearman").values.loc["x", "y"]
        for mapped_x in (np.exp(x), x ** 3, np.log(x)):
            mapped = correlation_analysis(flat_profile_of(x=mapped_x, y=y), method="spearman").values.loc["x", "y"]
            assert mapped == pytest.approx(plain, abs=1e-12)
