"""Pooled-variance two-sample t-tests between the fastest- and
slowest-growing communities, p-value rankings, and the cross-K consensus
feature selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .growth import GrowthFit, summarize_clusters
from .ingest import DemographicTable
from .similarity import CorrelationMatrix
from .spectral import (KMeansConfig, cluster_embedding, eigen_sym,
                       embedding_from_spectrum)
from .util import DiagnosticLog

_CF_TOL = 1e-14
_CF_MAX_ITER = 500


@dataclass
class TTestResult:
    feature: str
    mean_fast: float
    mean_slow: float
    t_stat: float
    df: int
    p_value: float


@dataclass
class FeatureSelection:
    selected: list[str]
    per_k_rankings: dict[int, list[TTestResult]]
    rule: str


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, evaluated by the modified
    Lentz method."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            break
    return h


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: int) -> float:
    """Two-sided Student-t tail probability P(|T| >= |t|)."""
    if df < 1:
        raise ContractError("df must be >= 1")
    t = float(t)
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return reg_inc_beta(x, df / 2.0, 0.5)


def t_test(group1, group2, feature: str = "",
           diag: DiagnosticLog | None = None) -> TTestResult:
    """Two-sample t-test with pooled variance; two-sided p-value.

    Zero pooled variance is degenerate: p = 1 when the means agree,
    p = 0 otherwise, both flagged.
    """
    diag = diag if diag is not None else DiagnosticLog()
    g1 = np.asarray(group1, dtype=float)
    g2 = np.asarray(group2, dtype=float)
    n1, n2 = g1.size, g2.size
    if n1 < 2 or n2 < 2:
        raise ContractError("both groups need at least 2 observations")
    df = n1 + n2 - 2
    m1, m2 = float(g1.mean()), float(g2.mean())
    pooled = ((n1 - 1) * g1.var(ddof=1) + (n2 - 1) * g2.var(ddof=1)) / df
    if pooled <= 0.0:
        if m1 == m2:
            diag.add("t-test", feature, "zero pooled variance with equal means; p = 1")
            return TTestResult(feature, m1, m2, 0.0, df, 1.0)
        diag.add("t-test", feature, "zero pooled variance with unequal means; p = 0")
        return TTestResult(feature, m1, m2, math.copysign(math.inf, m1 - m2), df, 0.0)
    t = (m1 - m2) / math.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    return TTestResult(feature, m1, m2, t, df, student_t_sf(t, df))


def rank_features(demo: DemographicTable, fast, slow,
                  diag: DiagnosticLog | None = None) -> list[TTestResult]:
    """One t-test per feature between the fast and slow entity sets,
    ordered by ascending p-value with ties broken by feature name."""
    fast, slow = list(fast), list(slow)
    if set(fast) & set(slow):
        raise ContractError("fast and slow sets must be disjoint")
    idx = demo.index()
    fast_rows = [idx[e] for e in fast if e in idx]
    slow_rows = [idx[e] for e in slow if e in idx]
    if len(fast_rows) < 2 or len(slow_rows) < 2:
        raise ContractError("each group needs at least 2 entities present in demographics")
    results = []
    for j, name in enumerate(demo.feature_names):
        results.append(t_test(demo.values[fast_rows, j], demo.values[slow_rows, j],
                              feature=name, diag=diag))
    results.sort(key=lambda r: (r.p_value, r.feature))
    return results


def consensus_select(demo: DemographicTable, corr: CorrelationMatrix,
                     fits: list[GrowthFit], k_values=(2, 3, 4, 5),
                     top_m: int = 8, q: int = 7,
                     kmeans_cfg: KMeansConfig | None = None,
                     diag: DiagnosticLog | None = None,
                     spectrum: tuple[np.ndarray, np.ndarray] | None = None
                     ) -> FeatureSelection:
    """Features that rank in the top `top_m` by p-value for every K.

    For each K the correlation matrix is re-clustered, the fastest and
    slowest communities (by mean fitted growth rate) are compared per
    feature, and features are ranked by p-value. Features in the top
    `top_m` for all K form the consensus; if more than q qualify the q
    with the best mean rank are kept, and if fewer qualify the list is
    filled with the best remaining features by mean rank.

    A precomputed `spectrum` (eigenvalues, eigenvectors) of the
    correlation matrix avoids re-decomposing once per K.
    """
    if list(demo.entities) != list(corr.entities):
        raise ContractError("demographics and correlation matrix must share entity order")
    kmeans_cfg = kmeans_cfg or KMeansConfig()
    q = min(q, len(demo.feature_names))
    values, vectors = spectrum if spectrum is not None else eigen_sym(corr.values)
    rankings: dict[int, list[TTestResult]] = {}
    positions: dict[str, list[int]] = {f: [] for f in demo.feature_names}
    for K in k_values:
        if not 1 <= K < len(corr.entities):
            raise ContractError(f"cannot cluster {len(corr.entities)} entities into {K} communities")
        emb = embedding_from_spectrum(values, vectors, K, "largest")
        part = cluster_embedding(emb, corr.entities, K, "correlation", kmeans_cfg, diag)
        _, fastest, slowest = summarize_clusters(fits, part)
        ranking = rank_features(demo, part.members(fastest), part.members(slowest), diag)
        rankings[K] = ranking
        for pos, res in enumerate(ranking, start=1):
            positions[res.feature].append(pos)
    mean_rank = {f: float(np.mean(p)) for f, p in positions.items()}
    consensus = [f for f in demo.feature_names
                 if all(pos <= top_m for pos in positions[f])]
    consensus.sort(key=lambda f: (mean_rank[f], f))
    if len(consensus) > q:
        selected = consensus[:q]
    else:
        rest = sorted((f for f in demo.feature_names if f not in consensus),
                      key=lambda f: (mean_rank[f], f))
        selected = consensus + rest[: q - len(consensus)]
    rule = (f"features ranked in the top {top_m} for every K in "
            f"{tuple(k_values)}; trimmed/filled to {q} by mean rank")
    return FeatureSelection(selected, rankings, rule)


def bonferroni(p: float, m: int) -> float:
    """Bonferroni-adjusted p-value (reported alongside rankings, never used
    for selection)."""
    return min(1.0, p * m)
