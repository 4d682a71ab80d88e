"""Randomized properties of the bill, the optimizers and the ingestion helpers."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dcbattery.billing import baseline_bill, bill_breakdown
from dcbattery.domain import BatterySpec, DispatchSolution, RegulationSeries, Tariff, TraceSeries
from dcbattery.gain import superlinear_ratio
from dcbattery.ingest import resample
from dcbattery.optimizers import SolveOptions, optimize_joint, optimize_peak_shaving, optimize_regulation

loads = st.lists(st.floats(0.0, 5.0, allow_nan=False), min_size=1, max_size=12)
prices = st.builds(
    Tariff,
    lambda_elec=st.floats(0, 2),
    lambda_peak=st.floats(0, 20),
    lambda_c=st.floats(0, 20),
    lambda_b=st.floats(0, 1),
    lambda_mis=st.floats(0, 10),
)
batteries = st.builds(
    lambda p, e, lo, span, pos: BatterySpec(p, e, lo + span * pos, lo, lo + span),
    st.floats(0, 2),
    st.floats(0.05, 2),
    st.floats(0, 0.4),
    st.floats(0, 0.6),
    st.floats(0, 1),
)


@given(loads, prices)
def test_idle_bill_is_baseline(s, tariff):
    tr = TraceSeries(s, 60)
    n = len(s)
    idle = DispatchSolution(np.zeros(n), 0.0, tr.samples, np.full(n, 0.5))
    assert np.isclose(bill_breakdown(tr, idle, np.zeros(n), tariff).total, baseline_bill(tr, tariff))


@settings(max_examples=40, deadline=None)
@given(loads, prices, batteries, st.booleans())
def test_peak_shaving_never_worse(s, tariff, battery, net_zero):
    tr = TraceSeries(s, 600)
    d, bill = optimize_peak_shaving(tr, battery, tariff, SolveOptions(net_energy_zero=net_zero))
    assert bill.total <= baseline_bill(tr, tariff) + 1e-7 * (1 + baseline_bill(tr, tariff))
    soc = d.soc
    assert soc.min() >= battery.soc_min - 1e-7 and soc.max() <= battery.soc_max + 1e-7


@settings(max_examples=40, deadline=None)
@given(loads, prices, batteries, st.sampled_from(["raw", "peak_plan", "free"]), st.data())
def test_joint_dominance(s, tariff, battery, mode, data):
    r = data.draw(st.lists(st.floats(-1, 1), min_size=len(s), max_size=len(s)))
    tr, reg = TraceSeries(s, 600), RegulationSeries(r, 600)
    opts = SolveOptions(baseline_mode=mode)
    plan, peak = optimize_peak_shaving(tr, battery, tariff, opts)
    _, joint = optimize_joint(tr, reg, battery, tariff, opts, peak_plan=plan)
    tol = 1e-7 * (1 + abs(peak.total))
    if mode != "raw":
        assert joint.total <= peak.total + tol
    _, R = optimize_regulation(reg, battery, tariff, opts)
    assert R >= -1e-9


@given(st.floats(1, 1e6), st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0, 1e6))
def test_ratio_sign_matches_inequality(J, Jp, Jr, Js):
    q = superlinear_ratio(J, Jp, Jr, Js)
    extra = (J - Js) - ((J - Jr) + (J - Jp))
    if q > 0:
        assert extra > 0
    elif q < 0:
        assert extra < 0


@given(st.lists(st.floats(-1, 1), min_size=12, max_size=60))
def test_resample_preserves_mean(r):
    series = RegulationSeries(r, 2)
    out = resample(series, 4)
    n = len(out) * 2
    assert np.isclose(out.samples.mean(), np.mean(r[:n]))
