"""Peak abstraction: daily thresholds, segmentation, shape tests and trace statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .domain import InputError, TraceSeries, as_series

log = logging.getLogger(__name__)

DAY_S = 86400.0
RECTANGULAR = "rectangular"
TRIANGULAR = "triangular"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class DayProfile:
    p_min: float
    p_max: float
    d: float
    f: float
    C_f: float

    @property
    def no_peaks(self) -> bool:
        return self.d == 0.0


@dataclass(frozen=True)
class PeakDescriptor:
    """Peak over samples ``t_a..t_b`` (inclusive); ``height`` is a fraction of ``d``."""

    t_a: int
    t_b: int
    height: float
    width: float
    shape: str = UNCLASSIFIED


def daily_threshold(day_samples, f: float) -> DayProfile:
    """``C_f = (1 - f) * d + p_min`` with ``d = p_max - p_min`` over the day."""
    s = as_series(day_samples, "day")
    if s.size == 0:
        raise InputError("empty day")
    if not 0.0 <= f <= 1.0:
        raise InputError(f"capping fraction f must be in [0, 1], got {f}")
    p_min, p_max = float(s.min()), float(s.max())
    d = p_max - p_min
    return DayProfile(p_min, p_max, d, f, (1 - f) * d + p_min)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) index pairs of the True runs in ``mask``."""
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def segment_peaks(day_samples, profile: DayProfile, t_s: float = 20.0) -> list[PeakDescriptor]:
    """Maximal runs with ``s(t) > C_f``; samples equal to ``C_f`` are valley."""
    s = as_series(day_samples, "day")
    if profile.no_peaks:
        return []
    peaks = []
    for a, b in _runs(s > profile.C_f):
        # mathematically at most f; clamp the last-bit rounding of the division
        height = min(float((s[a : b + 1] - profile.C_f).max() / profile.d), profile.f)
        peaks.append(PeakDescriptor(a, b, height, (b - a + 1) * t_s))
    return peaks


def area_growth(day_samples, f_grid, t_s: float = 20.0) -> np.ndarray:
    """Total area above ``C_f(f)`` (MW*s) for each capping fraction in ``f_grid``."""
    s = as_series(day_samples, "day")
    f_grid = np.asarray(f_grid, dtype=float)
    prof = daily_threshold(s, 0.0)
    levels = (1 - f_grid) * prof.d + prof.p_min
    return np.maximum(s[None, :] - levels[:, None], 0.0).sum(axis=1) * t_s


def _rss(x: np.ndarray, y: np.ndarray, degree: int) -> tuple[float, np.ndarray]:
    V = np.vander(x, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, y, rcond=None)
    resid = y - V @ coef
    return float(resid @ resid), coef


def classify_shape(areas, f_grid) -> str:
    """Rectangular if area grows linearly in ``f``, triangular if quadratically.

    Triangular: the quadratic fit cuts the linear fit's squared residuals by
    more than half and curves upward. Rectangular: the linear residuals are
    within 5% of the quadratic ones. Residuals below round-off count as zero.
    """
    y = np.asarray(areas, dtype=float)
    x = np.asarray(f_grid, dtype=float)
    if x.size < 4 or y.size != x.size:
        raise InputError("classify_shape needs at least 4 matching grid points")
    if not np.any(y != 0):
        raise InputError("all areas are zero; shape is undefined")
    floor = 1e-20 * float(y @ y)
    rss_lin, _ = _rss(x, y, 1)
    rss_quad, coef = _rss(x, y, 2)
    rss_lin = 0.0 if rss_lin <= floor else rss_lin
    rss_quad = 0.0 if rss_quad <= floor else rss_quad
    if rss_lin <= 1.05 * rss_quad:
        return RECTANGULAR
    if rss_lin - rss_quad > 0.5 * rss_lin and coef[2] > 0:
        return TRIANGULAR
    return UNCLASSIFIED


def peak_shape(day_samples, peak: PeakDescriptor, profile: DayProfile, grid_points: int = 8) -> str:
    """Run the area-growth test on one peak's own support, lowering the level
    from its apex down to ``C_f``."""
    seg = as_series(day_samples, "day")[peak.t_a : peak.t_b + 1]
    top = float(seg.max())
    depth = np.linspace(1.0 / grid_points, 1.0, grid_points)
    levels = top - depth * (top - profile.C_f)
    areas = np.maximum(seg[None, :] - levels[:, None], 0.0).sum(axis=1)
    return classify_shape(areas, depth)


def nocp_groups(peaks: list[PeakDescriptor], gap_threshold_s: float = 120.0, t_s: float = 20.0) -> list[int]:
    """Sizes of runs of contiguous peaks.

    The gap between two peaks is the valley between them,
    ``(t_a(next) - t_b(prev) - 1) * t_s``; gaps up to the threshold chain.
    """
    if not peaks:
        return []
    groups = [1]
    for prev, nxt in zip(peaks, peaks[1:]):
        if (nxt.t_a - prev.t_b - 1) * t_s <= gap_threshold_s:
            groups[-1] += 1
        else:
            groups.append(1)
    return groups


def ecdf(values) -> list[list[float]]:
    """Empirical CDF as ``[x, P(X <= x)]`` pairs at the distinct values."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return []
    xs, counts = np.unique(v, return_counts=True)
    cum = np.cumsum(counts) / v.size
    cum[-1] = 1.0
    return [[float(x), float(p)] for x, p in zip(xs, cum)]


@dataclass
class PeakStats:
    height_cdf: list[list[float]]
    width_cdf: list[list[float]]
    gap_cdf: list[list[float]]
    nocp_histogram: dict[int, int]
    day_shapes: list[dict] = field(default_factory=list)
    n_peaks: int = 0

    def as_dict(self) -> dict:
        return {
            "n_peaks": self.n_peaks,
            "height_cdf": self.height_cdf,
            "width_cdf": self.width_cdf,
            "gap_cdf": self.gap_cdf,
            "nocp_histogram": {str(k): v for k, v in sorted(self.nocp_histogram.items())},
            "days": self.day_shapes,
        }


def split_days(trace: TraceSeries) -> list[tuple[int, np.ndarray, bool]]:
    """Cut at UTC midnight; returns (day number, samples, is_partial)."""
    times = trace.start_time + np.arange(len(trace)) * trace.t_s
    day_no = np.floor(times / DAY_S).astype(np.int64)
    full = int(round(DAY_S / trace.t_s))
    out = []
    for day in np.unique(day_no):
        samples = trace.samples[day_no == day]
        out.append((int(day), samples, samples.size < full))
    return out


def peak_statistics(
    trace: TraceSeries,
    f: float = 0.2,
    gap_threshold_s: float = 120.0,
    shape_grid: int = 10,
    shape_depth: float = 1.0,
) -> PeakStats:
    """Pooled peak height/width/gap distributions and per-day shape verdicts.

    The day verdict fits area growth over capping fractions up to
    ``shape_depth`` (default: the whole daily range). Narrow peaks at coarse
    sampling leave too few samples in the top ``f`` of the range to tell a
    ramp from a plateau, so the fit looks deeper than the segmentation does.
    """
    days = split_days(trace)
    if len(days) == 1 and days[0][2]:
        log.warning("trace covers less than one day; treating it as a single day")
    heights, widths, gaps, groups = [], [], [], []
    day_rows = []
    if not 0 < shape_depth <= 1:
        raise InputError(f"shape_depth must be in (0, 1], got {shape_depth}")
    f_grid = np.linspace(shape_depth / shape_grid, shape_depth, shape_grid)
    for day, samples, partial in days:
        prof = daily_threshold(samples, f)
        peaks = segment_peaks(samples, prof, trace.t_s)
        heights += [p.height for p in peaks]
        widths += [p.width for p in peaks]
        gaps += [(b.t_a - a.t_b - 1) * trace.t_s for a, b in zip(peaks, peaks[1:])]
        groups += nocp_groups(peaks, gap_threshold_s, trace.t_s)
        verdict = UNCLASSIFIED
        if peaks:
            areas = area_growth(samples, f_grid, trace.t_s)
            if np.any(areas > 0):
                verdict = classify_shape(areas, f_grid)
        day_rows.append(
            {
                "day": day,
                "partial": partial,
                "p_min": prof.p_min,
                "p_max": prof.p_max,
                "C_f": prof.C_f,
                "n_peaks": len(peaks),
                "shape": verdict,
            }
        )
    hist: dict[int, int] = {}
    for g in groups:
        hist[g] = hist.get(g, 0) + 1
    return PeakStats(ecdf(heights), ecdf(widths), ecdf(gaps), hist, day_rows, len(heights))
