"""Four-scenario comparison, superlinear-gain detection and experiment sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .billing import baseline_bill, bill_breakdown
from .domain import (
    GAIN_GUARD,
    BatterySpec,
    DispatchSolution,
    GainReport,
    InputError,
    RegulationSeries,
    Tariff,
    TraceSeries,
)
from .optimizers import (
    SolveOptions,
    optimize_joint,
    optimize_peak_shaving,
    optimize_regulation,
    regulation_total_bill,
)
from .peaks import ecdf
from .synth import PeakCategory, RegulationModel, synth_regulation, synth_trace, trial_rng

log = logging.getLogger(__name__)


def superlinear_ratio(J: float, J_p: float, J_r: float, J_star: float) -> float:
    """Extra joint saving beyond the two separate savings, as a fraction of ``J``.

    Differences within a 1e-9 guard band of zero are reported as exactly 0.
    """
    if not J > 0:
        raise InputError(f"baseline bill J must be positive, got {J}")
    extra = (J - J_star) - ((J - J_r) + (J - J_p))
    if abs(extra) <= GAIN_GUARD * max(1.0, abs(J)):
        return 0.0
    return float(extra / J)


def run_four_scenarios(
    trace: TraceSeries,
    r: RegulationSeries,
    battery: BatterySpec,
    tariff: Tariff,
    opts: SolveOptions = SolveOptions(),
    peak: tuple[DispatchSolution, object] | None = None,
) -> GainReport:
    """Bills with the battery idle, peak shaving only, regulation only, and joint.

    ``peak`` may carry a precomputed ``optimize_peak_shaving`` result, which
    does not depend on ``r``.
    """
    if len(trace) != len(r):
        raise InputError(f"trace window has {len(trace)} samples but regulation has {len(r)}")
    s = trace.samples
    J = baseline_bill(trace, tariff)
    idle = DispatchSolution(b=np.zeros(s.size), C=0.0, y=s, soc=np.full(s.size, battery.soc_ini))
    original = bill_breakdown(trace, idle, r.samples, tariff)

    plan, peak_bill = peak if peak is not None else optimize_peak_shaving(trace, battery, tariff, opts)
    reg_dispatch, revenue = optimize_regulation(r, battery, tariff, opts, trace=trace)
    J_r = regulation_total_bill(trace, reg_dispatch, tariff, revenue)
    reg_bill = bill_breakdown(trace, reg_dispatch, r.samples, tariff)
    _joint_dispatch, joint_bill = optimize_joint(trace, r, battery, tariff, opts, peak_plan=plan)
    bills = {"original": original, "regulation": reg_bill, "peak": peak_bill, "joint": joint_bill}
    return GainReport.from_bills(J, peak_bill.total, J_r, joint_bill.total, bills)


@dataclass
class SweepSummary:
    hours_total: int
    hours_superlinear: int
    probability: float
    mean_q: float
    q_values: list[float]
    windows: list[GainReport] = field(default_factory=list, repr=False)

    @classmethod
    def from_reports(cls, reports: list[GainReport]) -> "SweepSummary":
        q = [r.q for r in reports]
        hits = sum(1 for r in reports if r.superlinear)
        n = len(reports)
        return cls(
            hours_total=n,
            hours_superlinear=hits,
            probability=hits / n if n else 0.0,
            mean_q=float(np.mean(q)) if n else 0.0,
            q_values=q,
            windows=list(reports),
        )

    def q_cdf(self) -> list[list[float]]:
        """Empirical CDF of ``q`` as ``[q, cumulative probability]`` pairs."""
        return ecdf(self.q_values)


def _run_window(args):
    trace, r, battery, tariff, opts = args
    return run_four_scenarios(trace, r, battery, tariff, opts)


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def hourly_windows(series, window: int) -> list[np.ndarray]:
    n = len(series.samples) // window
    return [series.samples[k * window : (k + 1) * window] for k in range(n)]


def sweep(
    trace: TraceSeries,
    r_trace: RegulationSeries,
    battery: BatterySpec,
    tariff: Tariff,
    opts: SolveOptions = SolveOptions(),
    workers: int = 1,
    window_s: float = 3600.0,
) -> SweepSummary:
    """Run the four scenarios on each aligned hour; windows are independent."""
    if not np.isclose(trace.t_s, r_trace.t_s):
        raise InputError(f"step mismatch: trace {trace.t_s} s, regulation {r_trace.t_s} s")
    steps = window_s / trace.t_s
    if abs(steps - round(steps)) > 1e-9:
        raise InputError(f"step {trace.t_s} s does not divide the {window_s} s window")
    steps = int(round(steps))
    loads = hourly_windows(trace, steps)
    regs = hourly_windows(r_trace, steps)
    n = min(len(loads), len(regs))
    if n == 0:
        raise InputError("no complete window in the inputs")
    jobs = [
        (
            TraceSeries(loads[k], trace.t_s, trace.start_time + k * window_s),
            RegulationSeries(regs[k], r_trace.t_s),
            battery,
            tariff,
            opts,
        )
        for k in range(n)
    ]
    return SweepSummary.from_reports(_map(_run_window, jobs, workers))


def _run_trial(args):
    trace, peak, model, index, seed, battery, tariff, opts = args
    r = synth_regulation(model, len(trace), trace.t_s, rng=trial_rng(seed, index))
    return run_four_scenarios(trace, r, battery, tariff, opts, peak=peak)


def category_trials(
    category: PeakCategory,
    n_trials: int,
    reg_model: RegulationModel,
    battery: BatterySpec,
    tariff: Tariff,
    seed: int,
    opts: SolveOptions = SolveOptions(),
    T: int = 180,
    t_s: float = 20.0,
    workers: int = 1,
) -> list[GainReport]:
    """Reports for ``n_trials`` regulation draws against one synthetic load shape."""
    if n_trials < 1:
        raise InputError("n_trials must be >= 1")
    trace = synth_trace(category, T, t_s)
    peak = optimize_peak_shaving(trace, battery, tariff, opts)
    jobs = [(trace, peak, reg_model, i, seed, battery, tariff, opts) for i in range(n_trials)]
    return _map(_run_trial, jobs, workers)


def category_experiment(
    category: PeakCategory,
    n_trials: int,
    reg_model: RegulationModel,
    battery: BatterySpec,
    tariff: Tariff,
    seed: int,
    opts: SolveOptions = SolveOptions(),
    **kwargs,
) -> float:
    """Fraction of trials in which the joint saving is superlinear."""
    reports = category_trials(category, n_trials, reg_model, battery, tariff, seed, opts, **kwargs)
    return sum(r.superlinear for r in reports) / len(reports)
