import math
from datetime import date

import numpy as np
import pytest

from conftest import write_lines
from epigrowth.errors import (ConflictError, EmptyPanelError, FormatError,
                              JoinError)
from epigrowth.ingest import (DemographicTable, MobilityPanel, RawCasePanel,
                              RegisteredPanel, join_sources, parse_cases,
                              parse_demographics, parse_mobility, read_registered,
                              register, write_mobility, write_registered,
                              write_registered_as_cases)
from epigrowth.util import DiagnosticLog

WIDE = """
entity_id,name,2020-03-01,2020-03-02,2020-03-03
A,Alpha,1,2,3
B,Beta,0,0,5
"""

LONG = """
entity_id,date,count
A,2020-03-01,1
A,2020-03-02,2
A,2020-03-03,3
B,2020-03-01,0
B,2020-03-02,0
B,2020-03-03,5
"""


def test_parse_cases_wide_echo(tmp_path):
    panel = parse_cases(write_lines(tmp_path / "c.csv", WIDE), "wide")
    assert panel.entities == ["A", "B"]
    assert panel.names["A"] == "Alpha"
    assert panel.dates == [date(2020, 3, 1), date(2020, 3, 2), date(2020, 3, 3)]
    assert np.array_equal(panel.counts, [[1, 2, 3], [0, 0, 5]])


def test_parse_cases_long_matches_wide(tmp_path):
    wide = parse_cases(write_lines(tmp_path / "w.csv", WIDE), "wide")
    long = parse_cases(write_lines(tmp_path / "l.csv", LONG), "long")
    assert long.entities == wide.entities
    assert long.dates == wide.dates
    assert np.array_equal(long.counts, wide.counts)


def test_parse_cases_bad_cell_is_diagnosed(tmp_path):
    text = WIDE.replace("B,Beta,0,0,5", "B,Beta,0,abc,5")
    diag = DiagnosticLog()
    panel = parse_cases(write_lines(tmp_path / "c.csv", text), "wide", diag)
    assert len(diag.matching(source="cases", entity_id="B")) == 1
    # excluded cell falls back to the previous day's value
    assert np.array_equal(panel.counts[1], [0, 0, 5])


def test_parse_cases_header_errors(tmp_path):
    with pytest.raises(FormatError):
        parse_cases(write_lines(tmp_path / "c.csv", "id,name,2020-03-01\nA,x,1"), "wide")
    with pytest.raises(FormatError):
        parse_cases(write_lines(tmp_path / "c.csv", "entity_id,count\nA,1"), "long")


def test_parse_cases_conflicting_duplicate(tmp_path):
    text = LONG + "A,2020-03-02,9\n"
    with pytest.raises(ConflictError, match="A"):
        parse_cases(write_lines(tmp_path / "c.csv", text), "long")


def test_parse_cases_repairs_non_monotone(tmp_path):
    text = """
entity_id,name,2020-03-01,2020-03-02,2020-03-03
A,Alpha,5,3,7
"""
    diag = DiagnosticLog()
    panel = parse_cases(write_lines(tmp_path / "c.csv", text), "wide", diag)
    assert np.array_equal(panel.counts[0], [5, 5, 7])
    assert diag.matching(source="cases", entity_id="A")


def _raw(counts, start=date(2020, 3, 1)):
    from datetime import timedelta
    counts = np.atleast_2d(np.asarray(counts, dtype=float))
    entities = [f"e{i}" for i in range(counts.shape[0])]
    dates = [start + timedelta(days=j) for j in range(counts.shape[1])]
    return RawCasePanel(entities, {e: "" for e in entities}, dates, counts)


def test_register_threshold_definition():
    counts = [3, 8, 12, 15, 20, 24, 28, 31, 35, 39, 42, 46, 50, 53, 56, 58, 59, 60]
    panel = register(_raw(counts), threshold=12, min_length=14)
    assert len(panel.series[0]) == 16
    assert panel.series[0][0] == pytest.approx(math.log(12))
    assert panel.registration_day[0] == date(2020, 3, 3)


def test_register_discards_below_threshold_and_short():
    diag = DiagnosticLog()
    counts = np.array([
        [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 11, 11, 11, 11, 11],   # never reaches 12
        [1, 1, 1, 1, 1, 1, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21],  # 10 days < 14
        [12] * 16,
    ], dtype=float)
    panel = register(_raw(counts), 12, 14, diag)
    assert panel.entities == ["e2"]
    issues = [d.entity_id for d in diag.matching(source="register")]
    assert issues == ["e0", "e1"]


def test_register_empty_panel_errors():
    with pytest.raises(EmptyPanelError):
        register(_raw([[1, 2, 3]]), 12, 14)


def test_register_idempotent():
    counts = [3, 8, 12, 15, 20, 24, 28, 31, 35, 39, 42, 46, 50, 53, 56, 58]
    once = register(_raw(counts), 12, 14)
    again = register(_raw(np.exp(once.series[0]), start=once.registration_day[0]), 12, 14)
    assert np.allclose(once.series[0], again.series[0])
    assert len(once.series[0]) == len(again.series[0])


def test_register_invariants_hold():
    rng = np.random.default_rng(0)
    counts = np.maximum.accumulate(rng.integers(0, 40, (20, 30)).astype(float), axis=1)
    try:
        panel = register(_raw(counts), 12, 14)
    except EmptyPanelError:
        pytest.skip("all discarded for this draw")
    for w in panel.series:
        assert len(w) >= 14
        assert math.exp(w[0]) >= 12 - 1e-9
        assert np.all(np.diff(w) >= 0)


DEMO = """
entity_id,density,income
A,10.5,50000
B,2.0,41000
C,bad,1
"""


def test_parse_demographics_drops_bad_rows(tmp_path):
    diag = DiagnosticLog()
    table = parse_demographics(write_lines(tmp_path / "d.csv", DEMO), diag)
    assert table.entities == ["A", "B"]
    assert table.feature_names == ["density", "income"]
    assert diag.matching(source="demographics", entity_id="C")


def test_parse_demographics_duplicate_feature(tmp_path):
    with pytest.raises(FormatError):
        parse_demographics(write_lines(tmp_path / "d.csv", "entity_id,a,a\nA,1,2"))


MOB = """
entity_id,date,metric_distance,metric_visits,metric_encounters
A,2020-03-01,0.1,0.2,0.3
A,2020-03-03,0.3,0.4,0.5
B,2020-03-01,1,1,1
B,2020-03-02,2,2,2
"""


def test_parse_mobility_interpolates_interior_gap(tmp_path):
    diag = DiagnosticLog()
    mob = parse_mobility(write_lines(tmp_path / "m.csv", MOB), diag)
    a = mob.scores[mob.index()["A"]]
    assert a.shape == (3, 3)
    assert np.allclose(a[1], [0.2, 0.3, 0.4])  # midpoint of neighbors
    assert diag.matching(source="mobility", entity_id="A")


def test_parse_mobility_conflict(tmp_path):
    text = MOB + "B,2020-03-02,9,9,9\n"
    with pytest.raises(ConflictError):
        parse_mobility(write_lines(tmp_path / "m.csv", text))


def _three_sources():
    from datetime import timedelta
    entities = ["A", "B", "C"]
    panel = RegisteredPanel(entities,
                            [np.log(np.arange(12, 30, dtype=float))] * 3,
                            [date(2020, 3, 1)] * 3)
    demo = DemographicTable(["A", "B"], ["f1"], np.array([[1.0], [2.0]]))
    mob = MobilityPanel(entities, [date(2020, 3, 1)] * 3,
                        [np.zeros((5, 3))] * 3)
    return panel, demo, mob


def test_join_restricts_to_intersection():
    panel, demo, mob = _three_sources()
    diag = DiagnosticLog()
    p2, d2, m2 = join_sources(panel, demo, mob, diag)
    assert p2.entities == d2.entities == m2.entities == ["A", "B"]
    dropped = {(d.source, d.entity_id) for d in diag}
    assert ("cases", "C") in dropped and ("mobility", "C") in dropped


def test_join_identity_when_keys_match():
    panel, demo, mob = _three_sources()
    demo = DemographicTable(["A", "B", "C"], ["f1"], np.ones((3, 1)))
    diag = DiagnosticLog()
    p2, d2, m2 = join_sources(panel, demo, mob, diag)
    assert p2.entities == ["A", "B", "C"]
    assert len(diag) == 0


def test_join_empty_intersection_errors():
    panel, demo, mob = _three_sources()
    demo = DemographicTable(["Z"], ["f1"], np.array([[1.0]]))
    with pytest.raises(JoinError):
        join_sources(panel, demo, mob)


def test_registered_roundtrip(tmp_path):
    counts = [3, 8, 12, 15, 20, 24, 28, 31, 35, 39, 42, 46, 50, 53, 56, 58]
    panel = register(_raw(counts), 12, 14)
    write_registered(panel, tmp_path / "r.csv")
    back = read_registered(tmp_path / "r.csv")
    assert back.entities == panel.entities
    assert back.registration_day == panel.registration_day
    assert np.allclose(back.series[0], panel.series[0])


def test_registered_as_cases_roundtrip(tmp_path):
    from epigrowth.sbm import planted_growth_panel
    panel, _ = planted_growth_panel(4, [0.05, 0.2], 0.0, 30, seed=1, x0=6.0)
    write_registered_as_cases(panel, tmp_path / "cases.csv")
    raw = parse_cases(tmp_path / "cases.csv", "wide")
    back = register(raw, 12, 14)
    assert back.entities == panel.entities
    assert back.registration_day == panel.registration_day
    for w1, w2 in zip(back.series, panel.series):
        assert np.allclose(w1, w2, atol=1e-12)


def test_mobility_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    mob = MobilityPanel(["A", "B"], [date(2020, 3, 1), date(2020, 3, 5)],
                        [rng.standard_normal((4, 3)), rng.standard_normal((6, 3))])
    write_mobility(mob, tmp_path / "m.csv")
    back = parse_mobility(tmp_path / "m.csv")
    assert back.entities == mob.entities
    assert back.start == mob.start
    for a, b in zip(back.scores, mob.scores):
        assert np.allclose(a, b)
