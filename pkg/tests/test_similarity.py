import numpy as np
import pytest

from conftest import random_ragged_panel
from epigrowth.errors import ContractError
from epigrowth.ingest import RegisteredPanel
from epigrowth.similarity import (AdjacencyGraph, CorrelationMatrix, correlation,
                                  epsilon_graph, knn_graph, read_correlation,
                                  write_correlation, write_edge_list)
from epigrowth.util import DiagnosticLog
from oracles import epsilon_edges_brute, knn_edges_brute, pearson_brute


def test_identical_series_correlate_one(tiny_panel):
    corr = correlation(tiny_panel)
    assert corr.values[2, 2] == 1.0
    # a vs itself via a clone panel
    clone = RegisteredPanel(["x", "y"], [tiny_panel.series[0].copy()] * 2,
                            tiny_panel.registration_day[:2], 1, 3)
    assert correlation(clone).values[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_perfect_anticorrelation(tiny_panel):
    corr = correlation(tiny_panel)
    i, j = 2, 3  # [0,1,2,3,4] vs [2,1,0]
    assert corr.values[i, j] == pytest.approx(-1.0, abs=1e-12)


def test_ragged_pair_matches_hand_value(tiny_panel):
    # First 3 points of [0,1,3,6] against [1,2,2]: R = 2/sqrt(7).
    corr = correlation(tiny_panel)
    assert corr.values[0, 1] == pytest.approx(0.7559289460184544, abs=1e-12)
    assert corr.pair_lengths[0, 1] == 3


def test_pair_lengths_and_invariants(tiny_panel):
    corr = correlation(tiny_panel)
    lengths = tiny_panel.lengths()
    assert np.array_equal(corr.pair_lengths, np.minimum.outer(lengths, lengths))
    assert np.allclose(corr.values, corr.values.T)
    assert np.all(np.abs(corr.values) <= 1 + 1e-12)
    assert np.all(np.diag(corr.values) == 1.0)


@pytest.mark.parametrize("mean_window", ["pair", "full"])
def test_correlation_matches_brute_force(mean_window):
    rng = np.random.default_rng(7)
    for trial in range(6):
        panel = random_ragged_panel(rng, int(rng.integers(4, 14)))
        corr = correlation(panel, mean_window)
        n = len(panel.entities)
        for i in range(n):
            for j in range(i + 1, n):
                expected = pearson_brute(panel.series[i], panel.series[j], mean_window)
                assert corr.values[i, j] == pytest.approx(expected, abs=1e-10)


def test_correlation_affine_invariance():
    rng = np.random.default_rng(11)
    panel = random_ragged_panel(rng, 8)
    base = correlation(panel).values
    scaled = RegisteredPanel(panel.entities,
                             [3.7 * w + 11.0 for w in panel.series],
                             panel.registration_day, 1, 2)
    assert np.allclose(correlation(scaled).values, base, atol=1e-10)


def test_degenerate_pair_rule():
    from datetime import date
    panel = RegisteredPanel(["flat", "rise"],
                            [np.full(5, 2.0), np.arange(5.0)],
                            [date(2020, 3, 1)] * 2, 1, 2)
    diag = DiagnosticLog()
    corr = correlation(panel, diag=diag)
    assert corr.values[0, 1] == 0.0
    assert corr.values[0, 0] == 1.0
    assert any("zero variance" in d.issue for d in diag)


def test_correlation_requires_length_two():
    from datetime import date
    panel = RegisteredPanel(["a"], [np.array([1.0])], [date(2020, 3, 1)], 1, 1)
    with pytest.raises(ContractError):
        correlation(panel)


def _toy_corr(values, keys=None):
    values = np.asarray(values, dtype=float)
    keys = keys or [f"e{i}" for i in range(values.shape[0])]
    return CorrelationMatrix(keys, values, np.full(values.shape, 5, dtype=int))


def test_epsilon_graph_thresholds():
    r = np.full((4, 4), 0.995)
    np.fill_diagonal(r, 1.0)
    complete = epsilon_graph(_toy_corr(r), 0.007)
    assert complete.edges.sum() == 12  # 0.995 >= 0.993: all off-diagonal pairs
    empty = epsilon_graph(_toy_corr(r), 0.004)
    assert empty.edges.sum() == 0  # 0.995 < 0.996
    assert np.all(np.diag(complete.edges) == 0)


def test_epsilon_graph_brute_force_and_monotonicity():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(4, 12))
        r = rng.uniform(0.9, 1.0, (n, n))
        r = (r + r.T) / 2
        np.fill_diagonal(r, 1.0)
        corr = _toy_corr(r)
        eps1, eps2 = sorted(rng.uniform(0.001, 0.1, 2))
        g1, g2 = epsilon_graph(corr, eps1), epsilon_graph(corr, eps2)
        assert np.array_equal(g1.edges, epsilon_edges_brute(r, eps1))
        assert np.all(g1.edges <= g2.edges)  # edge sets nest as eps grows


def test_epsilon_graph_precondition():
    with pytest.raises(ContractError):
        epsilon_graph(_toy_corr(np.eye(3)), 0.0)


def test_knn_graph_or_rule():
    # A's top neighbor is B, B's top is C: with k=1 both A-B and B-C appear.
    r = np.array([
        [1.0, 0.9, 0.1],
        [0.9, 1.0, 0.95],
        [0.1, 0.95, 1.0],
    ])
    g = knn_graph(_toy_corr(r, ["A", "B", "C"]), 1)
    assert g.edges[0, 1] == 1 and g.edges[1, 2] == 1
    assert g.edges[0, 2] == 0


def test_knn_complete_when_k_is_n_minus_1():
    rng = np.random.default_rng(5)
    r = rng.uniform(-1, 1, (6, 6))
    r = (r + r.T) / 2
    np.fill_diagonal(r, 1.0)
    g = knn_graph(_toy_corr(r), 5)
    assert g.edges.sum() == 30


def test_knn_matches_brute_force_with_ties():
    rng = np.random.default_rng(9)
    for _ in range(5):
        n = int(rng.integers(4, 12))
        # quantized values force ties; the key order must break them
        r = np.round(rng.uniform(0, 1, (n, n)), 1)
        r = (r + r.T) / 2
        np.fill_diagonal(r, 1.0)
        keys = [f"e{i:02d}" for i in range(n)]
        corr = _toy_corr(r, keys)
        k = int(rng.integers(1, n - 1))
        assert np.array_equal(knn_graph(corr, k).edges, knn_edges_brute(r, k, keys))


def test_knn_every_node_has_an_edge():
    rng = np.random.default_rng(13)
    r = rng.uniform(-1, 1, (9, 9))
    r = (r + r.T) / 2
    np.fill_diagonal(r, 1.0)
    g = knn_graph(_toy_corr(r), 1)
    assert np.all(g.edges.sum(axis=1) >= 1)


def test_knn_precondition():
    with pytest.raises(ContractError):
        knn_graph(_toy_corr(np.eye(3)), 3)


def test_correlation_csv_roundtrip(tmp_path, tiny_panel):
    corr = correlation(tiny_panel)
    write_correlation(corr, tmp_path / "corr.csv")
    back = read_correlation(tmp_path / "corr.csv")
    assert back.entities == corr.entities
    assert np.allclose(back.values, corr.values)


def test_edge_list_output(tmp_path):
    g = AdjacencyGraph(["a", "b", "c"],
                       np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.int8),
                       "epsilon", 0.01)
    write_edge_list(g, tmp_path / "edges.csv")
    text = (tmp_path / "edges.csv").read_text().strip().splitlines()
    assert text == ["src,dst", "a,b", "b,c"]
