"""CSV ingestion, resampling, hourly windowing and JSON reports."""

from __future__ import annotations

import csv
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .domain import InputError, RegulationSeries, TraceSeries

log = logging.getLogger(__name__)

TRACE_HEADER = ("timestamp", "power_mw")
REG_HEADER = ("timestamp", "r")
REG_CLAMP_BAND = 1.001


def _parse_time(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    dt = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _read_two_columns(path, header: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    times, values = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(c.strip().lower() for c in first) != header:
            raise InputError(f"{path}: expected header '{','.join(header)}', got {first!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                times.append(_parse_time(row[0]))
                values.append(float(row[1]))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from None
            if not math.isfinite(values[-1]):
                raise InputError(f"{path}:{lineno}: non-finite value")
    if not times:
        raise InputError(f"{path}: no data rows")
    return np.array(times), np.array(values)


def _step(times: np.ndarray, path) -> float:
    if times.size == 1:
        return float("nan")
    diffs = np.diff(times)
    t_s = float(diffs[0])
    if t_s <= 0:
        raise InputError(f"{path}: timestamps must increase (index 1)")
    bad = np.flatnonzero(np.abs(diffs - t_s) > 1e-6 * max(1.0, t_s))
    if bad.size:
        i = int(bad[0]) + 1
        raise InputError(f"{path}: non-uniform timestamps at index {i} (step {diffs[i - 1]} s, expected {t_s} s)")
    return t_s


def load_trace_csv(path, t_s: float | None = None) -> TraceSeries:
    """Read ``timestamp,power_mw``; the step is inferred from the timestamps.

    A one-row file needs ``t_s`` passed explicitly.
    """
    times, values = _read_two_columns(path, TRACE_HEADER)
    neg = np.flatnonzero(values < 0)
    if neg.size:
        raise InputError(f"{path}:{int(neg[0]) + 2}: negative power {values[neg[0]]}")
    step = _step(times, path)
    if math.isnan(step):
        if t_s is None:
            raise InputError(f"{path}: cannot infer the step from a single row")
        step = t_s
    return TraceSeries(values, step, float(times[0]))


def load_regulation_csv(path, t_s: float | None = None) -> RegulationSeries:
    """Read ``timestamp,r``. Values within 0.001 of [-1, 1] are clamped, others rejected."""
    times, values = _read_two_columns(path, REG_HEADER)
    bad = np.flatnonzero(np.abs(values) > REG_CLAMP_BAND)
    if bad.size:
        i = int(bad[0])
        raise InputError(f"{path}:{i + 2}: regulation value {values[i]} outside [-1, 1]")
    step = _step(times, path)
    if math.isnan(step):
        if t_s is None:
            raise InputError(f"{path}: cannot infer the step from a single row")
        step = t_s
    return RegulationSeries(np.clip(values, -1.0, 1.0), step, float(times[0]))


def _write_two_columns(path, header, start: float, t_s: float, values: np.ndarray) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, v in enumerate(values):
            w.writerow([repr(start + i * t_s), f"{v:.6f}"])


def write_trace_csv(trace: TraceSeries, path) -> None:
    _write_two_columns(path, TRACE_HEADER, trace.start_time, trace.t_s, trace.samples)


def write_regulation_csv(reg: RegulationSeries, path) -> None:
    _write_two_columns(path, REG_HEADER, reg.start_time, reg.t_s, reg.samples)


def resample(series, target_ts: float):
    """Average consecutive blocks down to ``target_ts``; a partial last block is dropped."""
    ratio = target_ts / series.t_s
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, ratio):
        raise InputError(f"target step {target_ts} s is not an integer multiple of {series.t_s} s")
    n = len(series.samples) // k
    means = series.samples[: n * k].reshape(n, k).mean(axis=1)
    return type(series)(means, target_ts, series.start_time)


def window_hours(trace, window_s: float = 3600.0) -> list:
    """Consecutive whole windows (default one hour); a trailing partial window is dropped."""
    steps = window_s / trace.t_s
    if abs(steps - round(steps)) > 1e-9:
        raise InputError(f"step {trace.t_s} s does not divide {window_s} s")
    steps = int(round(steps))
    n = len(trace.samples) // steps
    dropped = len(trace.samples) - n * steps
    if dropped:
        log.warning("dropping %d trailing samples that do not fill a whole window", dropped)
    cls = type(trace)
    return [
        cls(trace.samples[k * steps : (k + 1) * steps], trace.t_s, trace.start_time + k * window_s)
        for k in range(n)
    ]


def report_document(records, summary, config_echo: dict | None = None) -> dict:
    """Assemble the sweep report; ``records`` are GainReports in window order."""
    per_window = []
    for index, rep in enumerate(records):
        per_window.append(
            {
                "index": index,
                "J": rep.J,
                "J_p": rep.J_p,
                "J_r": rep.J_r,
                "J_star": rep.J_star,
                "q": rep.q,
                "superlinear": rep.superlinear,
                "bill_breakdowns": {k: v.as_dict() for k, v in rep.bills.items()},
            }
        )
    if summary is None:
        summ = {"hours_total": 0, "hours_superlinear": 0, "probability": 0.0, "mean_q": 0.0, "q_cdf": []}
    else:
        summ = {
            "hours_total": summary.hours_total,
            "hours_superlinear": summary.hours_superlinear,
            "probability": summary.probability,
            "mean_q": summary.mean_q,
            "q_cdf": summary.q_cdf(),
        }
    return {"config_echo": config_echo or {}, "per_window": per_window, "summary": summ}


def write_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def write_report_json(records, summary, path, config_echo: dict | None = None) -> None:
    write_json(report_document(records, summary, config_echo), path)
