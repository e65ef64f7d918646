"""Ordinary least squares of lead-day growth on mobility rows, per entity
(semi-parametric route) or pooled per community."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from ..util import DiagnosticLog
from .data import SupervisedSeries

_COND_LIMIT = 1e12
_RIDGE_SCALE = 1e-8
MIN_LINEAR_ROWS = 5  # more rows than the 4 parameters of [1, s_t]


@dataclass
class CountyLinearModel:
    entity: str
    alpha: float
    beta: np.ndarray
    lead: int

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return self.alpha + np.asarray(rows, dtype=float) @ self.beta


def _solve_ols(x: np.ndarray, y: np.ndarray, label: str,
               diag: DiagnosticLog | None) -> np.ndarray:
    """Normal equations with a ridge fallback when near-singular."""
    design = np.column_stack([np.ones(x.shape[0]), x])
    gram = design.T @ design
    rhs = design.T @ y
    if np.linalg.cond(gram) < _COND_LIMIT:
        return np.linalg.solve(gram, rhs)
    ridge = _RIDGE_SCALE * np.trace(gram) / gram.shape[0]
    if ridge <= 0.0:
        raise ContractError(f"rank-deficient design for {label} even after ridge fallback")
    if diag is not None:
        diag.add("ols", label, "near-singular normal equations; ridge fallback applied")
    return np.linalg.solve(gram + ridge * np.eye(gram.shape[0]), rhs)


def fit_county_linear(series: SupervisedSeries,
                      diag: DiagnosticLog | None = None) -> CountyLinearModel:
    """Per-entity regression of y_{t+lead} on [1, s_t]."""
    if series.inputs.shape[0] < MIN_LINEAR_ROWS:
        raise ContractError(
            f"need at least {MIN_LINEAR_ROWS} rows, got {series.inputs.shape[0]}")
    coeffs = _solve_ols(series.inputs, series.targets, series.entity, diag)
    return CountyLinearModel(series.entity, float(coeffs[0]), coeffs[1:], series.lead)


def fit_pooled_linear(series_list: list[SupervisedSeries], lead: int,
                      label: str = "pooled",
                      diag: DiagnosticLog | None = None) -> CountyLinearModel:
    """One regression on the stacked rows of several entities."""
    if not series_list:
        raise ContractError("no series to pool")
    x = np.vstack([s.inputs for s in series_list])
    y = np.concatenate([s.targets for s in series_list])
    coeffs = _solve_ols(x, y, label, diag)
    return CountyLinearModel(label, float(coeffs[0]), coeffs[1:], lead)
