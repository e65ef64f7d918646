"""Pairwise Pearson similarity over ragged log series and thresholded graphs.

Each pair (i, j) is compared over its first T_ij = min(T_i, T_j) days, with
means taken over exactly that window.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, FormatError
from .ingest import RegisteredPanel
from .util import DiagnosticLog, read_csv_rows, write_csv

# Window variances at or below this floor are treated as zero (a flat
# log-series has no shape information).
_VAR_FLOOR = 1e-12


@dataclass
class CorrelationMatrix:
    entities: list[str]
    values: np.ndarray  # (n, n) symmetric, unit diagonal
    pair_lengths: np.ndarray  # (n, n) int, min(T_i, T_j)

    @property
    def n(self) -> int:
        return len(self.entities)

    def restrict(self, keys: list[str]) -> "CorrelationMatrix":
        idx = {e: i for i, e in enumerate(self.entities)}
        pos = np.array([idx[k] for k in keys], dtype=int)
        return CorrelationMatrix(list(keys), self.values[np.ix_(pos, pos)],
                                 self.pair_lengths[np.ix_(pos, pos)])


@dataclass
class AdjacencyGraph:
    entities: list[str]
    edges: np.ndarray  # (n, n) 0/1, symmetric, zero diagonal
    kind: str  # "epsilon" | "knn" | "sbm"
    parameter: float

    @property
    def n(self) -> int:
        return len(self.entities)


def correlation(panel: RegisteredPanel, mean_window: str = "pair",
                diag: DiagnosticLog | None = None) -> CorrelationMatrix:
    """Pearson correlation of every entity pair over the first T_ij points.

    mean_window selects how the means inside the coefficient are taken:
    "pair" recomputes them over the shared T_ij window (default), "full"
    uses each entity's full-series mean. Pairs where either truncated
    series has zero variance get correlation 0 and a diagnostic.
    """
    diag = diag if diag is not None else DiagnosticLog()
    if mean_window not in ("pair", "full"):
        raise ContractError(f"unknown mean_window {mean_window!r}")
    lengths = panel.lengths()
    if np.any(lengths < 2):
        raise ContractError("every series must have length >= 2")
    n = len(panel.entities)
    t_max = int(lengths.max())

    # Zero-padded value matrix, globally row-centered to tame cancellation in
    # the sum-of-squares update. Row centering leaves Pearson unchanged.
    w = np.zeros((n, t_max))
    for i, s in enumerate(panel.series):
        w[i, : len(s)] = s
    offsets = np.array([s.mean() for s in panel.series])
    for i in range(n):
        w[i, : lengths[i]] -= offsets[i]

    t_ij = np.minimum.outer(lengths, lengths)
    cross = w @ w.T  # padding zeros make this the sum over min(T_i, T_j)
    cums = np.cumsum(w, axis=1)
    cumsq = np.cumsum(w * w, axis=1)
    rows = np.arange(n)[:, None]
    s_i = cums[rows, t_ij - 1]  # entity i's running sum over its first T_ij days
    q_i = cumsq[rows, t_ij - 1]
    s_j, q_j = s_i.T, q_i.T

    if mean_window == "pair":
        num = cross - s_i * s_j / t_ij
        den_i = q_i - s_i * s_i / t_ij
        den_j = q_j - s_j * s_j / t_ij
    else:
        # Full-series means equal zero after centering, so no mean terms.
        num = cross
        den_i, den_j = q_i, q_j

    degenerate = (den_i <= _VAR_FLOOR) | (den_j <= _VAR_FLOOR)
    np.fill_diagonal(degenerate, False)
    denom = np.sqrt(np.where(degenerate, 1.0, den_i) * np.where(degenerate, 1.0, den_j))
    values = np.where(degenerate, 0.0, num / np.where(denom == 0.0, 1.0, denom))
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 1.0)

    for i, j in zip(*np.nonzero(np.triu(degenerate, 1))):
        diag.add("correlation", f"{panel.entities[i]}|{panel.entities[j]}",
                 "zero variance over shared window; correlation set to 0")
    return CorrelationMatrix(list(panel.entities), values, t_ij.astype(int))


def epsilon_graph(corr: CorrelationMatrix, epsilon: float) -> AdjacencyGraph:
    """Edge (i, j) iff R_ij >= 1 - epsilon, i != j."""
    if not 0.0 < epsilon < 2.0:
        raise ContractError("epsilon must lie in (0, 2)")
    edges = (corr.values >= 1.0 - epsilon).astype(np.int8)
    np.fill_diagonal(edges, 0)
    return AdjacencyGraph(list(corr.entities), edges, "epsilon", float(epsilon))


def knn_graph(corr: CorrelationMatrix, k: int) -> AdjacencyGraph:
    """Edge (i, j) iff either endpoint lists the other among its k highest-R
    neighbors (self excluded). Equal correlations break ties by entity-key
    lexicographic order, so the graph is deterministic.
    """
    n = corr.n
    if not 1 <= k < n:
        raise ContractError("k must satisfy 1 <= k < n")
    lex_rank = np.empty(n, dtype=int)
    lex_rank[np.argsort(np.array(corr.entities, dtype=object))] = np.arange(n)
    nearest = np.zeros((n, n), dtype=np.int8)
    for j in range(n):
        col = corr.values[:, j].copy()
        col[j] = -np.inf
        order = np.lexsort((lex_rank, -col))  # primary: R descending
        nearest[order[:k], j] = 1
    edges = (nearest | nearest.T).astype(np.int8)
    np.fill_diagonal(edges, 0)
    return AdjacencyGraph(list(corr.entities), edges, "knn", float(k))


# --- serialization ----------------------------------------------------------

def write_correlation(corr: CorrelationMatrix, path: str | Path) -> None:
    rows = [[key] + list(corr.values[i]) for i, key in enumerate(corr.entities)]
    write_csv(path, ["entity_id"] + list(corr.entities), rows)


def read_correlation(path: str | Path) -> CorrelationMatrix:
    header, rows = read_csv_rows(path)
    if not header or header[0] != "entity_id":
        raise FormatError("correlation CSV header must start with entity_id")
    entities = header[1:]
    values = np.array([[float(c) for c in row[1:]] for row in rows])
    if values.shape != (len(entities), len(entities)):
        raise FormatError("correlation CSV is not square")
    return CorrelationMatrix(entities, values, np.zeros(values.shape, dtype=int))


def write_edge_list(graph: AdjacencyGraph, path: str | Path) -> None:
    rows = []
    for i in range(graph.n):
        for j in range(i + 1, graph.n):
            if graph.edges[i, j]:
                rows.append([graph.entities[i], graph.entities[j]])
    write_csv(path, ["src", "dst"], rows)
