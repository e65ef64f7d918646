"""Supervised panel construction: align lead-day log growth with same-day
mobility rows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from ..ingest import DemographicTable, MobilityPanel, RegisteredPanel
from ..util import DiagnosticLog


@dataclass
class SupervisedSeries:
    """Aligned rows for one entity: inputs[t] is the mobility (plus optional
    demographic) vector on day t, targets[t] the log growth from day t to
    day t + lead."""

    entity: str
    inputs: np.ndarray  # (T, p)
    targets: np.ndarray  # (T,)
    lead: int
    first_day: int  # day-since-registration index of inputs[0], 1-based

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ContractError("inputs and targets must align")


@dataclass
class Scaler:
    mean: np.ndarray
    sd: np.ndarray  # zero spread is stored as 1 so transforms stay finite

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.sd


def fit_scaler(rows: np.ndarray) -> Scaler:
    rows = np.asarray(rows, dtype=float)
    mean = rows.mean(axis=0)
    sd = rows.std(axis=0)
    return Scaler(mean, np.where(sd == 0.0, 1.0, sd))


def build_supervised(panel: RegisteredPanel, mob: MobilityPanel, lead: int,
                     demo: DemographicTable | None = None,
                     drop_metric: int | None = None,
                     diag: DiagnosticLog | None = None) -> list[SupervisedSeries]:
    """Per entity, targets y_{t+lead} = w_{t+lead} - w_t for every day t with
    both case endpoints and a mobility row; inputs are the raw mobility rows
    (a demographic vector is appended to every step when `demo` is given).

    Entities whose case/mobility overlap admits no usable row are skipped
    with a diagnostic, as are entities missing from the mobility panel.
    """
    diag = diag if diag is not None else DiagnosticLog()
    if lead < 1:
        raise ContractError("lead must be >= 1")
    mob_idx = mob.index()
    demo_idx = demo.index() if demo is not None else {}
    out: list[SupervisedSeries] = []
    for i, key in enumerate(panel.entities):
        if key not in mob_idx:
            diag.add("supervised", key, "no mobility series; skipped")
            continue
        if demo is not None and key not in demo_idx:
            diag.add("supervised", key, "no demographic vector; skipped")
            continue
        w = panel.series[i]
        mi = mob_idx[key]
        # Day index (1-based, relative to registration) of the mobility window.
        m_first = (mob.start[mi] - panel.registration_day[i]).days + 1
        m_last = m_first + mob.scores[mi].shape[0] - 1
        t_lo = max(1, m_first)
        t_hi = min(len(w) - lead, m_last)
        if t_hi < t_lo:
            diag.add("supervised", key,
                     f"case/mobility overlap shorter than lead+1 days at lead {lead}; skipped")
            continue
        rows = mob.scores[mi][t_lo - m_first : t_hi - m_first + 1]
        if drop_metric is not None:
            rows = np.delete(rows, drop_metric, axis=1)
        targets = w[t_lo + lead - 1 : t_hi + lead] - w[t_lo - 1 : t_hi]
        if demo is not None:
            d = demo.values[demo_idx[key]]
            rows = np.hstack([rows, np.tile(d, (rows.shape[0], 1))])
        out.append(SupervisedSeries(key, np.ascontiguousarray(rows, dtype=float),
                                    targets.astype(float), lead, t_lo))
    return out
