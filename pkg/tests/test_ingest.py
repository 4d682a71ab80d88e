import json

import numpy as np
import pytest

from dcbattery.domain import GainReport, InputError, RegulationSeries, TraceSeries
from dcbattery.gain import SweepSummary
from dcbattery.ingest import (
    load_regulation_csv,
    load_trace_csv,
    report_document,
    resample,
    window_hours,
    write_report_json,
    write_trace_csv,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_two_rows(tmp_path):
    tr = load_trace_csv(write(tmp_path, "t.csv", "timestamp,power_mw\n0,1.5\n20,2.0\n"))
    assert len(tr) == 2 and tr.t_s == 20


def test_iso_timestamps(tmp_path):
    tr = load_trace_csv(
        write(tmp_path, "t.csv", "timestamp,power_mw\n2024-01-01T00:00:00Z,1\n2024-01-01T00:00:20Z,1\n")
    )
    assert tr.t_s == 20 and tr.start_time == 1704067200.0


def test_missing_header(tmp_path):
    with pytest.raises(InputError, match="timestamp,power_mw"):
        load_trace_csv(write(tmp_path, "t.csv", "0,1\n20,1\n"))


def test_gap_reports_index(tmp_path):
    with pytest.raises(InputError, match="index 2"):
        load_trace_csv(write(tmp_path, "t.csv", "timestamp,power_mw\n0,1\n20,1\n60,1\n"))


def test_malformed_row_line(tmp_path):
    with pytest.raises(InputError, match=":3:"):
        load_trace_csv(write(tmp_path, "t.csv", "timestamp,power_mw\n0,1\n20,abc\n"))


def test_negative_power(tmp_path):
    with pytest.raises(InputError, match="negative"):
        load_trace_csv(write(tmp_path, "t.csv", "timestamp,power_mw\n0,1\n20,-1\n"))


def test_single_row_needs_step(tmp_path):
    p = write(tmp_path, "t.csv", "timestamp,power_mw\n0,1\n")
    with pytest.raises(InputError):
        load_trace_csv(p)
    assert load_trace_csv(p, t_s=20).t_s == 20


def test_regulation_values(tmp_path):
    const = load_regulation_csv(write(tmp_path, "a.csv", "timestamp,r\n0,0.5\n2,0.5\n4,0.5\n"))
    np.testing.assert_array_equal(const.samples, 0.5)
    clamped = load_regulation_csv(write(tmp_path, "b.csv", "timestamp,r\n0,1.0005\n2,-1.0005\n"))
    np.testing.assert_array_equal(clamped.samples, [1.0, -1.0])
    with pytest.raises(InputError):
        load_regulation_csv(write(tmp_path, "c.csv", "timestamp,r\n0,1.5\n2,0\n"))


def test_resample_means():
    r = RegulationSeries(np.full(1800, 0.5), 2)
    out = resample(r, 20)
    assert len(out) == 180 and out.t_s == 20
    np.testing.assert_array_equal(out.samples, 0.5)
    ten = RegulationSeries(np.arange(10) / 10, 2)
    assert resample(ten, 20).samples[0] == pytest.approx(0.45)
    with pytest.raises(InputError):
        resample(ten, 3)


def test_resample_composes():
    rng = np.random.default_rng(0)
    tr = TraceSeries(rng.random(600), 2)
    np.testing.assert_allclose(resample(resample(tr, 10), 20).samples, resample(tr, 20).samples)


def test_window_hours(caplog):
    assert [len(w) for w in window_hours(TraceSeries(np.ones(360), 20))] == [180, 180]
    with caplog.at_level("WARNING"):
        wins = window_hours(TraceSeries(np.ones(200), 20))
    assert len(wins) == 1 and "20 trailing" in caplog.text
    with pytest.raises(InputError):
        window_hours(TraceSeries(np.ones(10), 7))


def test_csv_roundtrip(tmp_path):
    tr = TraceSeries(np.round(np.random.default_rng(1).random(50) * 3, 6), 20, 100.0)
    write_trace_csv(tr, tmp_path / "t.csv")
    back = load_trace_csv(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.samples, tr.samples)
    assert (back.t_s, back.start_time) == (20, 100.0)


def test_report_empty(tmp_path):
    write_report_json([], None, tmp_path / "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc == {
        "config_echo": {},
        "per_window": [],
        "summary": {"hours_total": 0, "hours_superlinear": 0, "probability": 0.0, "mean_q": 0.0, "q_cdf": []},
    }


def test_report_keys_and_roundtrip(tmp_path):
    reps = [GainReport.from_bills(10.0, 9.0, 9.5, 8.0), GainReport.from_bills(10.0, 9.0, 9.5, 8.6)]
    summary = SweepSummary.from_reports(reps)
    doc = report_document(reps, summary, {"seed": 1})
    assert list(doc["per_window"][0]) == ["index", "J", "J_p", "J_r", "J_star", "q", "superlinear", "bill_breakdowns"]
    write_report_json(reps, summary, tmp_path / "r.json", {"seed": 1})
    assert json.loads((tmp_path / "r.json").read_text()) == doc
    qs = [p[0] for p in doc["summary"]["q_cdf"]]
    assert qs == sorted(qs)
