import numpy as np
import pytest

from dcbattery.domain import InputError, TraceSeries
from dcbattery.peaks import (
    RECTANGULAR,
    TRIANGULAR,
    UNCLASSIFIED,
    PeakDescriptor,
    area_growth,
    classify_shape,
    daily_threshold,
    ecdf,
    nocp_groups,
    peak_shape,
    peak_statistics,
    segment_peaks,
    split_days,
)
from dcbattery.synth import PeakCategory, synth_trace


def test_threshold_formula():
    prof = daily_threshold([1.0, 2.0, 1.5], 0.2)
    assert prof.C_f == (1 - 0.2) * 1.0 + 1.0
    assert prof.C_f == 1.8
    assert daily_threshold([3, 3], 0.2).no_peaks


def test_threshold_errors():
    with pytest.raises(InputError):
        daily_threshold([], 0.2)
    with pytest.raises(InputError):
        daily_threshold([1, 2], 1.5)


def test_segment_strict_threshold():
    s = [0.0, 1.0, 0.8, 0.9, 0.0]
    prof = daily_threshold(s, 0.2)  # C_f = 0.8
    peaks = segment_peaks(s, prof, t_s=20)
    assert [(p.t_a, p.t_b) for p in peaks] == [(1, 1), (3, 3)]
    assert peaks[0].height == pytest.approx(0.2)
    assert peaks[0].width == 20


def test_flat_day_has_no_peaks():
    assert segment_peaks([2, 2, 2], daily_threshold([2, 2, 2], 0.2)) == []


def test_area_growth_shapes():
    f = np.linspace(0.02, 0.2, 10)
    rect = synth_trace(PeakCategory.parse("rect.wide.high")).samples
    tri = synth_trace(PeakCategory.parse("tri.wide.high")).samples
    assert classify_shape(area_growth(rect, f), f) == RECTANGULAR
    assert classify_shape(area_growth(tri, f), f) == TRIANGULAR


def test_classify_rejects_bad_input():
    with pytest.raises(InputError):
        classify_shape([1, 2, 3], [0.1, 0.2, 0.3])
    with pytest.raises(InputError):
        classify_shape(np.zeros(5), np.linspace(0, 1, 5))


def test_classify_concave_is_unclassified():
    x = np.linspace(0.1, 1, 10)
    assert classify_shape(np.sqrt(x), x) == UNCLASSIFIED


def test_peak_shape_local():
    s = synth_trace(PeakCategory.parse("tri.wide.low")).samples
    prof = daily_threshold(s, 0.2)
    (p,) = segment_peaks(s, prof)
    assert peak_shape(s, p, prof) == TRIANGULAR


def test_nocp_gap_rule():
    mk = lambda a, b: PeakDescriptor(a, b, 0.1, (b - a + 1) * 20)
    peaks = [mk(0, 5), mk(12, 17), mk(24, 29), mk(40, 41)]
    # valleys of 6, 6 and 10 samples
    assert nocp_groups(peaks, 120, 20) == [3, 1]
    assert nocp_groups([], 120, 20) == []


def test_ecdf():
    pts = ecdf([3, 1, 2, 2])
    assert pts == [[1.0, 0.25], [2.0, 0.75], [3.0, 1.0]]
    assert ecdf([]) == []


def test_split_days():
    tr = TraceSeries(np.ones(3 * 4320 // 2), 20, start_time=0)
    days = split_days(tr)
    assert [d[0] for d in days] == [0, 1]
    assert [d[2] for d in days] == [False, True]


def test_peak_statistics_on_synthetic_day():
    hour = synth_trace(PeakCategory.parse("rect.narrow.low", count=3, gap_s=120)).samples
    tr = TraceSeries(np.tile(hour, 24), 20)
    stats = peak_statistics(tr)
    assert stats.n_peaks == 72
    assert stats.nocp_histogram == {3: 24}
    assert stats.width_cdf == [[120.0, 1.0]]
    assert stats.day_shapes[0]["shape"] == RECTANGULAR
    assert stats.day_shapes[0]["partial"] is False
    d = stats.as_dict()
    assert d["nocp_histogram"] == {"3": 24}


def test_narrow_triangle_day_needs_full_depth():
    hour = synth_trace(PeakCategory.parse("tri.narrow.high")).samples
    tr = TraceSeries(np.tile(hour, 24), 20)
    assert peak_statistics(tr).day_shapes[0]["shape"] == TRIANGULAR
    # only the apex sample sits in the top 20% of the range
    assert peak_statistics(tr, shape_depth=0.2).day_shapes[0]["shape"] == RECTANGULAR
    with pytest.raises(InputError):
        peak_statistics(tr, shape_depth=0)


def test_short_trace_warns(caplog):
    tr = synth_trace(PeakCategory.parse("rect.narrow.low"))
    with caplog.at_level("WARNING"):
        peak_statistics(tr)
    assert "less than one day" in caplog.text
