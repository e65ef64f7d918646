"""Synthetic generators: stochastic block models and planted growth panels.

Randomness comes from PCG64 streams derived from (seed, stream key), so
every artifact is reproducible bit-for-bit from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .errors import ContractError
from .ingest import DemographicTable, MobilityPanel, RawCasePanel, RegisteredPanel, register
from .similarity import AdjacencyGraph
from .util import rng_stream

_BASE_DATE = date(2020, 3, 1)


@dataclass
class BlockModel:
    """SBM parameters: n nodes in K communities with connectivity B."""

    n: int
    K: int
    B: np.ndarray  # (K, K) symmetric, entries in [0, 1]
    labels: np.ndarray  # (n,) community ids in 1..K

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.B.shape != (self.K, self.K):
            raise ContractError("B must be K x K")
        if not np.allclose(self.B, self.B.T):
            raise ContractError("B must be symmetric")
        if np.any(self.B < 0) or np.any(self.B > 1):
            raise ContractError("B entries must lie in [0, 1]")
        if self.labels.shape != (self.n,) or np.any(self.labels < 1) or np.any(self.labels > self.K):
            raise ContractError("labels must be n community ids in 1..K")

    @property
    def theta(self) -> np.ndarray:
        """One-hot membership matrix, n x K."""
        t = np.zeros((self.n, self.K))
        t[np.arange(self.n), self.labels - 1] = 1.0
        return t


@dataclass
class PopulationMatrix:
    values: np.ndarray  # (n, n), equals theta @ B @ theta.T


def balanced_labels(n_per_group: int, groups: int) -> np.ndarray:
    return np.repeat(np.arange(1, groups + 1), n_per_group)


def population_matrix(model: BlockModel) -> PopulationMatrix:
    """Expected connectivity P with P_ij = B[Z_i, Z_j]."""
    z = model.labels - 1
    return PopulationMatrix(model.B[np.ix_(z, z)])


def sample_adjacency(model: BlockModel, seed: int) -> AdjacencyGraph:
    """One SBM draw: upper-triangle entries are independent Bernoulli(P_ij),
    mirrored to a symmetric 0/1 graph with zero diagonal. Draw order is the
    row-major upper triangle of a PCG64 stream keyed by the seed.
    """
    p = population_matrix(model).values
    rng = rng_stream(seed, 0x5B)
    iu = np.triu_indices(model.n, k=1)
    draws = rng.random(iu[0].size)
    edges = np.zeros((model.n, model.n), dtype=np.int8)
    edges[iu] = (draws < p[iu]).astype(np.int8)
    edges |= edges.T
    entities = [f"n{i:04d}" for i in range(model.n)]
    return AdjacencyGraph(entities, edges, "sbm", float(seed))


def planted_growth_panel(n_per_group: int, rates: list[float], noise_sd: float,
                         T: int, seed: int, x0: float = 12.0,
                         noise: str = "multiplicative", threshold: int = 12,
                         min_length: int = 14,
                         ) -> tuple[RegisteredPanel, np.ndarray]:
    """Panel of exponential growth curves x_t = x0 * (1 + r_g)^t, t = 1..T,
    one growth rate per group, with optional Gaussian noise on the counts.

    noise="multiplicative" scales the noise sd by the count level,
    "additive" uses noise_sd directly. Noisy counts are repaired to be
    non-decreasing by cumulative maximum, then registered like real data.
    Returns the registered panel and ground-truth group labels (1-based)
    aligned to its entities.
    """
    if len(set(rates)) != len(rates):
        raise ContractError("rates must be distinct")
    if T < min_length:
        raise ContractError(f"T must be >= {min_length}")
    if noise_sd < 0:
        raise ContractError("noise_sd must be >= 0")
    if noise not in ("multiplicative", "additive"):
        raise ContractError(f"unknown noise model {noise!r}")
    rng = rng_stream(seed, 0x6C)
    groups = len(rates)
    n = n_per_group * groups
    labels = balanced_labels(n_per_group, groups)
    t = np.arange(1, T + 1)
    counts = np.empty((n, T))
    for g, r in enumerate(rates, start=1):
        counts[labels == g] = x0 * (1.0 + r) ** t
    if noise_sd > 0:
        scale = counts if noise == "multiplicative" else 1.0
        counts = counts + rng.normal(0.0, 1.0, counts.shape) * noise_sd * scale
        counts = np.maximum(counts, 1.0)
        counts = np.maximum.accumulate(counts, axis=1)
    entities = [f"e{i:04d}" for i in range(n)]
    dates = [_BASE_DATE + timedelta(days=j) for j in range(T)]
    raw = RawCasePanel(entities, {e: "" for e in entities}, dates, counts)
    panel = register(raw, threshold=threshold, min_length=min_length)
    keep = {e: i for i, e in enumerate(entities)}
    true_labels = np.array([labels[keep[e]] for e in panel.entities])
    return panel, true_labels


def planted_forecast_data(n_per_group: int, groups: int, T: int, lead: int, seed: int,
                          dynamics: str = "linear", d_lo: float = 0.05,
                          d_hi: float = 0.25, n_noise_features: int = 2,
                          jitter: float = 0.02,
                          ) -> tuple[RegisteredPanel, DemographicTable, MobilityPanel, np.ndarray]:
    """Mobility-driven panel where the `lead`-day log growth is an exact
    function of the same-day first mobility metric.

    Each log series is a cumulative sum of positive daily increments
    (monotone by construction); the first mobility metric is then derived
    from the realized growth Y_t = w_{t+lead} - w_t so that at the
    construction lead

    - "linear":        Y_t = a + b * s1_t            (b > 0, one global rule)
    - "nonlinear":     Y_t = lo + (hi - lo) * s1_t^2 (sign of s1 random)
    - "heterogeneous": group 1 follows Y = a + b*s1, group 2 follows
      Y = a - b*s1; groups also differ in curve shape (accelerating vs
      decelerating increments) so correlation clustering can recover them,
      and the first demographic feature encodes the group.

    holds exactly, while the remaining two metrics are noise. Mobility
    covers the T input days; the case series runs `lead` days longer.
    """
    if dynamics not in ("linear", "nonlinear", "heterogeneous"):
        raise ContractError(f"unknown dynamics {dynamics!r}")
    if lead < 1:
        raise ContractError("lead must be >= 1")
    rng = rng_stream(seed, 0x7D)
    n = n_per_group * groups
    labels = balanced_labels(n_per_group, groups)
    total = T + lead  # case series extend `lead` days past the input window
    a = lead * (d_lo + d_hi) / 2.0
    b = lead * (d_hi - d_lo) / 2.0
    if dynamics == "heterogeneous":
        ramp_up = np.linspace(d_lo, d_hi, total)
        group_base = {1: ramp_up, 2: ramp_up[::-1]}
    entities = [f"e{i:04d}" for i in range(n)]
    series, mob_scores = [], []
    for i in range(n):
        if dynamics == "heterogeneous":
            d = group_base[int(labels[i])] + jitter * rng.uniform(-1.0, 1.0, total)
            d = np.maximum(d, 0.01)
        else:
            d = rng.uniform(d_lo, d_hi, total)
        w = np.log(13.0) + np.concatenate([[0.0], np.cumsum(d[1:])])
        growth = w[lead:] - w[:-lead]  # Y_t for input days t = 1..T
        if dynamics == "nonlinear":
            lo, hi = lead * d_lo, lead * d_hi
            frac = np.clip((growth - lo) / (hi - lo), 0.0, 1.0)
            s1 = rng.choice([-1.0, 1.0], T) * np.sqrt(frac)
        elif dynamics == "heterogeneous" and labels[i] == 2:
            s1 = (a - growth) / b
        else:
            s1 = (growth - a) / b
        s = np.column_stack([s1, rng.uniform(-1.0, 1.0, T), rng.uniform(-1.0, 1.0, T)])
        series.append(w)
        mob_scores.append(s)
    panel = RegisteredPanel(entities, series, [_BASE_DATE] * n, threshold=12,
                            min_length=min(14, total))
    mob = MobilityPanel(entities, [_BASE_DATE] * n, mob_scores)

    group_signal = (labels == 1).astype(float)
    demo_cols = [group_signal + 0.05 * rng.standard_normal(n)]
    names = ["group_signal"]
    for j in range(n_noise_features):
        demo_cols.append(rng.standard_normal(n))
        names.append(f"noise_{j}")
    demo = DemographicTable(entities, names, np.column_stack(demo_cols))
    return panel, demo, mob, labels
