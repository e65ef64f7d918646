import math
from datetime import date, timedelta

import numpy as np
import pytest

from epigrowth.errors import ContractError
from epigrowth.forecast import build_supervised, fit_scaler
from epigrowth.ingest import DemographicTable, MobilityPanel, RegisteredPanel
from epigrowth.util import DiagnosticLog

_DAY1 = date(2020, 3, 1)


def _panel(series):
    return RegisteredPanel([f"e{i}" for i in range(len(series))],
                           [np.asarray(s, dtype=float) for s in series],
                           [_DAY1] * len(series), threshold=1, min_length=2)


def _mob(lengths, start=_DAY1, fill=0.5):
    rng = np.random.default_rng(1)
    return MobilityPanel([f"e{i}" for i in range(len(lengths))],
                         [start] * len(lengths),
                         [rng.uniform(-1, 1, (t, 3)) for t in lengths])


def test_constant_doubling():
    panel = _panel([np.log([12, 24, 48, 96])])
    series = build_supervised(panel, _mob([3]), lead=1)
    assert len(series) == 1
    assert np.allclose(series[0].targets, math.log(2))
    assert series[0].inputs.shape == (3, 3)


def test_flat_series_zero_targets():
    panel = _panel([np.log([20.0] * 6)])
    series = build_supervised(panel, _mob([5]), lead=1)
    assert np.allclose(series[0].targets, 0.0)


def test_lead_four_alignment_index_oracle():
    w = np.cumsum(np.random.default_rng(2).uniform(0.01, 0.2, 20)) + math.log(12)
    panel = _panel([w])
    mob = _mob([20])
    series = build_supervised(panel, mob, lead=4)
    s = series[0]
    assert s.targets.shape == (16,)
    assert s.inputs.shape == (16, 3)
    for t in range(1, 17):  # day t inputs predict growth to day t+4
        assert s.targets[t - 1] == pytest.approx(w[t + 3] - w[t - 1], abs=1e-15)
        assert np.array_equal(s.inputs[t - 1], mob.scores[0][t - 1])


def test_mobility_starting_late_trims_window():
    w = np.arange(20.0)
    panel = _panel([w])
    mob = MobilityPanel(["e0"], [_DAY1 + timedelta(days=5)],
                        [np.ones((8, 3))])
    series = build_supervised(panel, mob, lead=2)
    s = series[0]
    # usable days t = 6..13: mobility exists and t+2 <= 20
    assert s.first_day == 6
    assert s.targets.shape == (8,)
    assert s.targets[0] == pytest.approx(w[7] - w[5])


def test_short_overlap_skips_with_diagnostic():
    panel = _panel([np.arange(6.0), np.arange(30.0)])
    mob = _mob([5, 29])
    diag = DiagnosticLog()
    series = build_supervised(panel, mob, lead=7, diag=diag)
    assert [s.entity for s in series] == ["e1"]
    assert diag.matching(source="supervised", entity_id="e0")


def test_missing_mobility_skips():
    panel = _panel([np.arange(10.0)])
    mob = MobilityPanel([], [], [])
    diag = DiagnosticLog()
    assert build_supervised(panel, mob, lead=1, diag=diag) == []
    assert diag.matching(entity_id="e0")


def test_demo_concatenation_and_drop_metric():
    panel = _panel([np.arange(12.0)])
    mob = _mob([11])
    demo = DemographicTable(["e0"], ["a", "b"], np.array([[7.0, 9.0]]))
    series = build_supervised(panel, mob, lead=1, demo=demo)
    assert series[0].inputs.shape == (11, 5)
    assert np.allclose(series[0].inputs[:, 3:], [7.0, 9.0])
    dropped = build_supervised(panel, mob, lead=1, drop_metric=1)
    assert dropped[0].inputs.shape == (11, 2)
    assert np.array_equal(dropped[0].inputs, mob.scores[0][:11][:, [0, 2]])


def test_lead_must_be_positive():
    with pytest.raises(ContractError):
        build_supervised(_panel([np.arange(10.0)]), _mob([9]), lead=0)


def test_scaler_zero_spread_guard():
    rows = np.array([[1.0, 5.0], [1.0, 7.0]])
    scaler = fit_scaler(rows)
    out = scaler.transform(rows)
    assert np.allclose(out[:, 0], 0.0)
    assert np.allclose(out[:, 1], [-1.0, 1.0])
    assert np.all(np.isfinite(out))
