"""Case, demographic, and mobility ingestion with curve registration.

Case series are shifted so that day one is the first day an entity's
cumulative count reaches the registration threshold, then log-transformed.
All three sources are aligned on a shared entity key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .errors import ConflictError, ContractError, EmptyPanelError, FormatError, JoinError
from .util import DiagnosticLog, read_csv_rows, write_csv

DEFAULT_THRESHOLD = 12
DEFAULT_MIN_LENGTH = 14

MOBILITY_METRICS = ("metric_distance", "metric_visits", "metric_encounters")


@dataclass
class RawCasePanel:
    """Cumulative case counts on a shared date axis, one row per entity."""

    entities: list[str]
    names: dict[str, str]
    dates: list[date]
    counts: np.ndarray  # (n, T), non-negative, non-decreasing per row

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.shape != (len(self.entities), len(self.dates)):
            raise ContractError("counts shape does not match entities x dates")


@dataclass
class RegisteredPanel:
    """Ragged log cumulative counts, day one = first day at/above threshold."""

    entities: list[str]
    series: list[np.ndarray]  # w_i, length T_i
    registration_day: list[date]
    threshold: int = DEFAULT_THRESHOLD
    min_length: int = DEFAULT_MIN_LENGTH

    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.series], dtype=int)

    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.entities)}

    def restrict(self, keys: list[str]) -> "RegisteredPanel":
        idx = self.index()
        pos = [idx[k] for k in keys]
        return RegisteredPanel(
            entities=list(keys),
            series=[self.series[i] for i in pos],
            registration_day=[self.registration_day[i] for i in pos],
            threshold=self.threshold,
            min_length=self.min_length,
        )


@dataclass
class DemographicTable:
    """Per-entity real-valued feature vectors."""

    entities: list[str]
    feature_names: list[str]
    values: np.ndarray  # (n, q_full)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(set(self.feature_names)) != len(self.feature_names):
            raise FormatError("duplicate feature names")

    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.entities)}

    def restrict(self, keys: list[str]) -> "DemographicTable":
        idx = self.index()
        pos = [idx[k] for k in keys]
        return DemographicTable(list(keys), list(self.feature_names), self.values[pos])

    def select_features(self, names: list[str]) -> "DemographicTable":
        col = {f: j for j, f in enumerate(self.feature_names)}
        missing = [f for f in names if f not in col]
        if missing:
            raise ContractError(f"unknown features: {missing}")
        cols = [col[f] for f in names]
        return DemographicTable(list(self.entities), list(names), self.values[:, cols])


@dataclass
class MobilityPanel:
    """Per-entity daily 3-metric mobility scores over a contiguous window."""

    entities: list[str]
    start: list[date]  # first date of each entity's window
    scores: list[np.ndarray]  # (T_i, 3)
    metric_names: tuple[str, ...] = MOBILITY_METRICS

    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.entities)}

    def restrict(self, keys: list[str]) -> "MobilityPanel":
        idx = self.index()
        pos = [idx[k] for k in keys]
        return MobilityPanel(list(keys), [self.start[i] for i in pos],
                             [self.scores[i] for i in pos], self.metric_names)

    def window(self, entity: str) -> tuple[date, date]:
        i = self.index()[entity]
        return self.start[i], self.start[i] + timedelta(days=len(self.scores[i]) - 1)


def _parse_count(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value) or value < 0:
        return None
    return value


def _repair_monotone(counts: np.ndarray, entities: list[str], diag: DiagnosticLog) -> np.ndarray:
    repaired = np.maximum.accumulate(counts, axis=1)
    changed = np.any(repaired != counts, axis=1)
    for i in np.flatnonzero(changed):
        diag.add("cases", entities[i], "non-monotone cumulative counts repaired by cumulative maximum")
    return repaired


def parse_cases(path: str | Path, format: str = "wide",
                diag: DiagnosticLog | None = None) -> RawCasePanel:
    """Read a cases CSV in wide (`entity_id,name,<date>,...`) or long
    (`entity_id,date,count`) layout into a panel on a unified date axis.

    Unparseable count cells are excluded and logged; the gap is filled from
    the previous day's value (0 before the first valid value) so the
    cumulative series stays usable. Non-monotone series are repaired by
    cumulative maximum.
    """
    diag = diag if diag is not None else DiagnosticLog()
    header, rows = read_csv_rows(path)
    if format == "wide":
        return _parse_cases_wide(header, rows, diag)
    if format == "long":
        return _parse_cases_long(header, rows, diag)
    raise ContractError(f"unknown cases format {format!r}")


def _parse_dates(cells: list[str]) -> list[date]:
    try:
        return [date.fromisoformat(c) for c in cells]
    except ValueError as exc:
        raise FormatError(f"bad date column in cases header: {exc}") from exc


def _parse_cases_wide(header, rows, diag) -> RawCasePanel:
    if len(header) < 3 or header[0] != "entity_id" or header[1] != "name":
        raise FormatError("wide cases header must be entity_id,name,<date>,...")
    dates = _parse_dates(header[2:])
    if sorted(dates) != dates:
        raise FormatError("date columns must be ascending")
    entities: list[str] = []
    names: dict[str, str] = {}
    seen_rows: dict[str, list[float | None]] = {}
    for row in rows:
        if len(row) != len(header):
            raise FormatError(f"wide cases row has {len(row)} cells, expected {len(header)}")
        key = row[0]
        values: list[float | None] = []
        for d, cell in zip(dates, row[2:]):
            v = _parse_count(cell)
            if v is None:
                diag.add("cases", key, f"unparseable count {cell!r} on {d.isoformat()}")
            values.append(v)
        if key in seen_rows:
            if seen_rows[key] != values:
                raise ConflictError(f"duplicate entity {key!r} with conflicting counts")
            continue
        seen_rows[key] = values
        entities.append(key)
        names[key] = row[1]
    counts = _fill_forward(entities, dates, seen_rows)
    counts = _repair_monotone(counts, entities, diag)
    return RawCasePanel(entities, names, dates, counts)


def _parse_cases_long(header, rows, diag) -> RawCasePanel:
    if header != ["entity_id", "date", "count"]:
        raise FormatError("long cases header must be entity_id,date,count")
    cell_values: dict[tuple[str, date], float] = {}
    entities: list[str] = []
    date_set: set[date] = set()
    for row in rows:
        if len(row) != 3:
            raise FormatError(f"long cases row has {len(row)} cells, expected 3")
        key = row[0]
        try:
            d = date.fromisoformat(row[1])
        except ValueError:
            diag.add("cases", key, f"unparseable date {row[1]!r}")
            continue
        if key not in entities:
            entities.append(key)
        date_set.add(d)
        v = _parse_count(row[2])
        if v is None:
            diag.add("cases", key, f"unparseable count {row[2]!r} on {d.isoformat()}")
            continue
        if (key, d) in cell_values:
            if cell_values[(key, d)] != v:
                raise ConflictError(f"conflicting counts for entity {key!r} on {d.isoformat()}")
            continue
        cell_values[(key, d)] = v
    dates = sorted(date_set)
    table = {key: [cell_values.get((key, d)) for d in dates] for key in entities}
    counts = _fill_forward(entities, dates, table)
    counts = _repair_monotone(counts, entities, diag)
    return RawCasePanel(entities, {k: "" for k in entities}, dates, counts)


def _fill_forward(entities, dates, table) -> np.ndarray:
    counts = np.zeros((len(entities), len(dates)))
    for i, key in enumerate(entities):
        last = 0.0
        for j, v in enumerate(table[key]):
            if v is not None:
                last = v
            counts[i, j] = last
    return counts


def register(panel: RawCasePanel, threshold: int = DEFAULT_THRESHOLD,
             min_length: int = DEFAULT_MIN_LENGTH,
             diag: DiagnosticLog | None = None) -> RegisteredPanel:
    """Shift each entity so day one is the first date with count >= threshold
    and return log series; entities with fewer than min_length registered
    days are discarded.
    """
    diag = diag if diag is not None else DiagnosticLog()
    entities, series, reg_days = [], [], []
    for i, key in enumerate(panel.entities):
        row = panel.counts[i]
        hits = np.flatnonzero(row >= threshold)
        if hits.size == 0:
            diag.add("register", key, f"never reached {threshold} cases; discarded")
            continue
        start = int(hits[0])
        window = row[start:]
        if window.size < min_length:
            diag.add("register", key,
                     f"only {window.size} days at/above {threshold} (< {min_length}); discarded")
            continue
        entities.append(key)
        series.append(np.log(window))
        reg_days.append(panel.dates[start])
    if not entities:
        raise EmptyPanelError("registration discarded every entity")
    return RegisteredPanel(entities, series, reg_days, threshold, min_length)


def parse_demographics(path: str | Path, diag: DiagnosticLog | None = None) -> DemographicTable:
    """Read `entity_id,<feature>,...`; entities with any missing or
    unparseable feature value are dropped and reported.
    """
    diag = diag if diag is not None else DiagnosticLog()
    header, rows = read_csv_rows(path)
    if len(header) < 2 or header[0] != "entity_id":
        raise FormatError("demographics header must be entity_id,<feature>,...")
    feature_names = header[1:]
    if len(set(feature_names)) != len(feature_names):
        raise FormatError("duplicate feature names in demographics header")
    entities: list[str] = []
    values: list[list[float]] = []
    seen: dict[str, list[float]] = {}
    for row in rows:
        if len(row) != len(header):
            raise FormatError(f"demographics row has {len(row)} cells, expected {len(header)}")
        key = row[0]
        try:
            vec = [float(c) for c in row[1:]]
        except ValueError:
            diag.add("demographics", key, "missing or unparseable feature value; entity dropped")
            continue
        if not all(math.isfinite(v) for v in vec):
            diag.add("demographics", key, "non-finite feature value; entity dropped")
            continue
        if key in seen:
            if seen[key] != vec:
                raise ConflictError(f"duplicate entity {key!r} with conflicting demographics")
            continue
        seen[key] = vec
        entities.append(key)
        values.append(vec)
    return DemographicTable(entities, feature_names, np.array(values, dtype=float).reshape(len(entities), len(feature_names)))


def parse_mobility(path: str | Path, diag: DiagnosticLog | None = None) -> MobilityPanel:
    """Read `entity_id,date,metric_distance,metric_visits,metric_encounters`.

    Interior missing dates are filled by linear interpolation between
    neighbors (logged); the usable window is each entity's observed span.
    """
    diag = diag if diag is not None else DiagnosticLog()
    header, rows = read_csv_rows(path)
    if header != ["entity_id", "date"] + list(MOBILITY_METRICS):
        raise FormatError("mobility header must be entity_id,date," + ",".join(MOBILITY_METRICS))
    per_entity: dict[str, dict[date, np.ndarray]] = {}
    order: list[str] = []
    for row in rows:
        if len(row) != 5:
            raise FormatError(f"mobility row has {len(row)} cells, expected 5")
        key = row[0]
        try:
            d = date.fromisoformat(row[1])
            vec = np.array([float(c) for c in row[2:5]])
        except ValueError:
            diag.add("mobility", key, f"unparseable mobility row for {row[1]!r}")
            continue
        if not np.all(np.isfinite(vec)):
            diag.add("mobility", key, f"non-finite mobility value on {d.isoformat()}")
            continue
        if key not in per_entity:
            per_entity[key] = {}
            order.append(key)
        if d in per_entity[key]:
            if not np.array_equal(per_entity[key][d], vec):
                raise ConflictError(f"conflicting mobility for entity {key!r} on {d.isoformat()}")
            continue
        per_entity[key][d] = vec
    entities, starts, scores = [], [], []
    for key in order:
        obs = per_entity[key]
        if not obs:
            continue
        days = sorted(obs)
        first, last = days[0], days[-1]
        span = (last - first).days + 1
        mat = np.full((span, 3), np.nan)
        for d, vec in obs.items():
            mat[(d - first).days] = vec
        gaps = np.flatnonzero(np.isnan(mat[:, 0]))
        if gaps.size:
            mat = _interpolate_gaps(mat)
            diag.add("mobility", key, f"{gaps.size} interior day(s) filled by linear interpolation")
        entities.append(key)
        starts.append(first)
        scores.append(mat)
    return MobilityPanel(entities, starts, scores)


def _interpolate_gaps(mat: np.ndarray) -> np.ndarray:
    # Interior gaps only: first and last rows are observed by construction.
    out = mat.copy()
    t = np.arange(mat.shape[0])
    for j in range(mat.shape[1]):
        col = mat[:, j]
        known = ~np.isnan(col)
        out[:, j] = np.interp(t, t[known], col[known])
    return out


def join_sources(cases: RegisteredPanel, demo: DemographicTable, mob: MobilityPanel,
                 diag: DiagnosticLog | None = None
                 ) -> tuple[RegisteredPanel, DemographicTable, MobilityPanel]:
    """Restrict all three sources to their shared entity keys, in the case
    panel's order; dropped keys are reported per source.
    """
    diag = diag if diag is not None else DiagnosticLog()
    shared = set(cases.entities) & set(demo.entities) & set(mob.entities)
    if not shared:
        raise JoinError("no entities common to cases, demographics, and mobility")
    keys = [e for e in cases.entities if e in shared]
    for source, present in (("cases", cases.entities), ("demographics", demo.entities),
                            ("mobility", mob.entities)):
        for key in present:
            if key not in shared:
                diag.add(source, key, "dropped: entity absent from another source")
    return cases.restrict(keys), demo.restrict(keys), mob.restrict(keys)


# --- on-disk artifact round-trips -----------------------------------------

def write_registered(panel: RegisteredPanel, path: str | Path) -> None:
    rows = []
    for i, key in enumerate(panel.entities):
        reg = panel.registration_day[i]
        for t, w in enumerate(panel.series[i], start=1):
            rows.append([key, t, (reg + timedelta(days=t - 1)).isoformat(), w])
    write_csv(path, ["entity_id", "day", "date", "log_count"], rows)


def read_registered(path: str | Path, threshold: int = DEFAULT_THRESHOLD,
                    min_length: int = DEFAULT_MIN_LENGTH) -> RegisteredPanel:
    header, rows = read_csv_rows(path)
    if header != ["entity_id", "day", "date", "log_count"]:
        raise FormatError("registered panel header mismatch")
    series: dict[str, list[float]] = {}
    starts: dict[str, date] = {}
    order: list[str] = []
    for key, day, d, w in rows:
        if key not in series:
            series[key] = []
            order.append(key)
        if int(day) == 1:
            starts[key] = date.fromisoformat(d)
        series[key].append(float(w))
    return RegisteredPanel(order, [np.array(series[k]) for k in order],
                           [starts[k] for k in order], threshold, min_length)


def write_demographics(table: DemographicTable, path: str | Path) -> None:
    rows = [[key] + list(table.values[i]) for i, key in enumerate(table.entities)]
    write_csv(path, ["entity_id"] + list(table.feature_names), rows)


def write_registered_as_cases(panel: RegisteredPanel, path: str | Path) -> None:
    """Emit a registered panel as a wide cases CSV that re-ingests to the
    same panel: counts are exp of the stored log series, days before an
    entity's registration are zero, and days after its window carry its
    last count forward (generators produce aligned end dates, so the
    carry-forward is a no-op for them).
    """
    starts = panel.registration_day
    ends = [starts[i] + timedelta(days=len(panel.series[i]) - 1)
            for i in range(len(panel.entities))]
    first, last = min(starts), max(ends)
    dates = [first + timedelta(days=j) for j in range((last - first).days + 1)]
    rows = []
    for i, key in enumerate(panel.entities):
        counts = np.exp(panel.series[i])
        lead_zeros = (starts[i] - first).days
        tail = (last - ends[i]).days
        row = ([0.0] * lead_zeros + list(counts) + [float(counts[-1])] * tail)
        rows.append([key, key] + row)
    write_csv(path, ["entity_id", "name"] + [d.isoformat() for d in dates], rows)


def write_mobility(panel: MobilityPanel, path: str | Path) -> None:
    rows = []
    for i, key in enumerate(panel.entities):
        for t in range(panel.scores[i].shape[0]):
            d = panel.start[i] + timedelta(days=t)
            rows.append([key, d.isoformat()] + list(panel.scores[i][t]))
    write_csv(path, ["entity_id", "date"] + list(MOBILITY_METRICS), rows)
