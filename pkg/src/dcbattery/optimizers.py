"""The three battery LPs (peak shaving, regulation, joint) and a greedy follower.

Every problem shares the battery block: ``b = b_plus - b_minus`` with both
parts nonnegative, ``b_plus + b_minus <= P``, the SoC window expressed on the
running sum of ``b`` and optionally a zero net-energy row. Absolute values
are split into nonnegative pairs, and the peak term uses a shaving-depth
variable ``D`` with ``max_t s(t) - D >= s(t) - b(t)``, so the peak charge is
``lambda_peak * (max s - D)``. All rows then start with a feasible slack or
singleton basis except the net-energy row.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .billing import bill_breakdown
from .domain import (
    BatterySpec,
    BillBreakdown,
    DispatchSolution,
    InputError,
    RegulationSeries,
    Tariff,
    TraceSeries,
    as_series,
    soc_trajectory,
)
from .lp import LinearProgram, dump_lp, solve_lp

log = logging.getLogger(__name__)

BASELINE_MODES = ("raw", "peak_plan", "free")


class SolverError(RuntimeError):
    """An optimizer LP ended infeasible or unbounded."""

    def __init__(self, message: str, status: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class SolveOptions:
    """Knobs shared by the optimizers.

    ``baseline_mode`` only affects the joint problem: ``raw`` reports the raw
    load as baseline, ``peak_plan`` reports the peak-shaving plan ``s - b^p``,
    ``free`` lets the LP choose the baseline (any ``y >= 0``).
    ``capacity_cap`` bounds the bid at ``capacity_cap * P``. With ``inf`` the
    regulation and joint LPs turn unbounded whenever the capacity price beats
    the mismatch penalty on the whole signal.
    """

    net_energy_zero: bool = True
    baseline_mode: str = "peak_plan"
    capacity_cap: float = 1.0
    rule: str = "dantzig"
    tol: float = 1e-8
    kernel: str | None = None
    dump_lp: str | None = None

    def __post_init__(self):
        if self.baseline_mode not in BASELINE_MODES:
            raise InputError(f"baseline_mode must be one of {BASELINE_MODES}")
        if not self.capacity_cap >= 0:
            raise InputError("capacity_cap must be >= 0")


class _Builder:
    """Allocates variable blocks and collects rows for one LP."""

    def __init__(self):
        self.blocks: dict[str, slice] = {}
        self.n = 0
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.names: list[str] = []
        self.rows: list[np.ndarray] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []

    def add(self, name: str, size: int, lower: float = 0.0, upper: float = math.inf) -> slice:
        sl = slice(self.n, self.n + size)
        self.blocks[name] = sl
        self.n += size
        self.lower += [lower] * size
        self.upper += [upper] * size
        self.names += [f"{name}[{i}]" for i in range(size)] if size > 1 else [name]
        return sl

    def rows_block(self, coefs: dict[str, np.ndarray], sense: str, rhs) -> None:
        """Add ``len(rhs)`` rows; ``coefs`` maps block name to a (rows, block size) matrix."""
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        block = np.zeros((rhs.size, self.n))
        for name, mat in coefs.items():
            block[:, self.blocks[name]] = np.asarray(mat, dtype=float).reshape(rhs.size, -1)
        self.rows.append(block)
        self.senses += [sense] * rhs.size
        self.rhs.append(rhs)

    def build(self, cost: dict[str, np.ndarray], offset: float) -> LinearProgram:
        c = np.zeros(self.n)
        for name, v in cost.items():
            c[self.blocks[name]] = v
        A = np.vstack([np.pad(r, ((0, 0), (0, self.n - r.shape[1]))) for r in self.rows])
        return LinearProgram(
            c=c,
            A=A,
            senses=self.senses,
            rhs=np.concatenate(self.rhs),
            lower=np.array(self.lower),
            upper=np.array(self.upper),
            offset=offset,
            names=self.names,
        )


def _battery_block(bld: _Builder, T: int, battery: BatterySpec, t_s: float, opts: SolveOptions) -> None:
    P = battery.power_cap
    bld.add("bp", T, 0.0)
    bld.add("bm", T, 0.0)
    eye = np.eye(T)
    bld.rows_block({"bp": eye, "bm": eye}, "<=", np.full(T, P))
    # SoC window in fractions of E; rows that cannot bind at full power are skipped
    step = (t_s / 3600.0) / battery.energy_cap
    cum = np.tril(np.ones((T, T))) * step
    reach = P * step * np.arange(1, T + 1)
    down = battery.soc_ini - battery.soc_min
    up = battery.soc_max - battery.soc_ini
    keep = reach > down
    if keep.any():
        bld.rows_block({"bp": cum[keep], "bm": -cum[keep]}, "<=", np.full(keep.sum(), down))
    keep = reach > up
    if keep.any():
        bld.rows_block({"bp": -cum[keep], "bm": cum[keep]}, "<=", np.full(keep.sum(), up))
    if opts.net_energy_zero:
        bld.rows_block({"bp": np.ones(T), "bm": -np.ones(T)}, "==", [0.0])


def _solve(lp: LinearProgram, opts: SolveOptions, what: str):
    if opts.dump_lp:
        dump_lp(lp, opts.dump_lp)
    out = solve_lp(lp, rule=opts.rule, kernel=opts.kernel, feas_tol=opts.tol)
    if not out.optimal:
        raise SolverError(f"{what} LP is {out.status}", out.status)
    log.debug("%s: %d pivots, violation %.2e", what, out.iterations, out.info["max_violation"])
    return out


def _dispatch(x, bld: _Builder, battery: BatterySpec, t_s: float, C: float, y) -> DispatchSolution:
    b = x[bld.blocks["bp"]] - x[bld.blocks["bm"]]
    b = np.clip(b, -battery.power_cap, battery.power_cap)
    return DispatchSolution(b=b, C=max(float(C), 0.0), y=y, soc=soc_trajectory(b, battery, t_s))


def _capacity_upper(opts: SolveOptions, battery: BatterySpec) -> float:
    return math.inf if math.isinf(opts.capacity_cap) else opts.capacity_cap * battery.power_cap


def _no_regulation(tariff: Tariff) -> Tariff:
    return replace(tariff, lambda_c=0.0, lambda_mis=0.0)


def optimize_peak_shaving(
    trace: TraceSeries,
    battery: BatterySpec,
    tariff: Tariff,
    opts: SolveOptions = SolveOptions(),
) -> tuple[DispatchSolution, BillBreakdown]:
    """Minimize energy + peak + degradation cost with the battery alone.

    The returned breakdown carries no regulation terms (``C = 0``, ``y = s``).
    """
    s = trace.samples
    T = s.size
    smax = float(s.max())
    bld = _Builder()
    _battery_block(bld, T, battery, trace.t_s, opts)
    bld.add("D", 1, -battery.power_cap)
    eye = np.eye(T)
    bld.rows_block({"D": np.ones((T, 1)), "bp": -eye, "bm": eye}, "<=", smax - s)
    lp = bld.build(
        {
            "bp": -tariff.lambda_elec + tariff.lambda_b,
            "bm": tariff.lambda_elec + tariff.lambda_b,
            "D": -tariff.lambda_peak,
        },
        offset=tariff.lambda_elec * float(s.sum()) + tariff.lambda_peak * smax,
    )
    out = _solve(lp, opts, "peak-shaving")
    dispatch = _dispatch(out.x, bld, battery, trace.t_s, 0.0, s)
    bill = bill_breakdown(trace, dispatch, np.zeros(T), _no_regulation(tariff))
    return dispatch, bill


def _regulation_lp(r, battery, tariff, t_s, opts):
    T = r.size
    bld = _Builder()
    _battery_block(bld, T, battery, t_s, opts)
    bld.add("C", 1, 0.0, _capacity_upper(opts, battery))
    bld.add("up", T)
    bld.add("um", T)
    eye = np.eye(T)
    bld.rows_block({"up": eye, "um": -eye, "bp": -eye, "bm": eye, "C": r.reshape(T, 1)}, "==", np.zeros(T))
    lp = bld.build(
        {
            "bp": tariff.lambda_b,
            "bm": tariff.lambda_b,
            "C": -tariff.lambda_c,
            "up": tariff.lambda_mis,
            "um": tariff.lambda_mis,
        },
        offset=0.0,
    )
    return bld, lp


def optimize_regulation(
    r: RegulationSeries,
    battery: BatterySpec,
    tariff: Tariff,
    opts: SolveOptions = SolveOptions(),
    trace: TraceSeries | None = None,
) -> tuple[DispatchSolution, float]:
    """Maximize regulation revenue over the bid ``C`` and the schedule ``b``.

    Returns the dispatch and the optimal revenue ``R*``. The baseline ``y``
    is the raw load when ``trace`` is given (mismatch is then ``|b - C r|``),
    zeros otherwise.
    """
    rs = r.samples
    bld, lp = _regulation_lp(rs, battery, tariff, r.t_s, opts)
    out = _solve(lp, opts, "regulation")
    C = out.x[bld.blocks["C"]][0]
    y = trace.samples if trace is not None else np.zeros(rs.size)
    dispatch = _dispatch(out.x, bld, battery, r.t_s, C, y)
    return dispatch, -out.objective


def regulation_total_bill(trace: TraceSeries, dispatch: DispatchSolution, tariff: Tariff, revenue: float) -> float:
    """Utility bill under the regulation-only schedule minus the market revenue."""
    s = trace.samples
    if dispatch.b.size != s.size:
        raise InputError(f"length mismatch: trace {s.size}, dispatch {dispatch.b.size}")
    grid = s - dispatch.b
    return float(tariff.lambda_elec * grid.sum() + tariff.lambda_peak * grid.max() - revenue)


def optimize_joint(
    trace: TraceSeries,
    r: RegulationSeries,
    battery: BatterySpec,
    tariff: Tariff,
    opts: SolveOptions = SolveOptions(),
    peak_plan: DispatchSolution | None = None,
) -> tuple[DispatchSolution, BillBreakdown]:
    """Minimize the utility bill less regulation revenue in one LP.

    ``peak_plan`` may pass a precomputed peak-shaving dispatch for
    ``baseline_mode="peak_plan"``; otherwise it is solved here.
    """
    s = trace.samples
    rs = r.samples
    T = s.size
    if rs.size != T:
        raise InputError(f"trace has {T} samples but regulation has {rs.size}")
    if not math.isclose(trace.t_s, r.t_s):
        raise InputError(f"step mismatch: trace {trace.t_s} s, regulation {r.t_s} s")
    mode = opts.baseline_mode
    if mode == "peak_plan" and peak_plan is None:
        peak_plan, _ = optimize_peak_shaving(trace, battery, tariff, opts)

    smax = float(s.max())
    bld = _Builder()
    _battery_block(bld, T, battery, trace.t_s, opts)
    bld.add("D", 1, -battery.power_cap)
    bld.add("C", 1, 0.0, _capacity_upper(opts, battery))
    bld.add("up", T)
    bld.add("um", T)
    eye = np.eye(T)
    bld.rows_block({"D": np.ones((T, 1)), "bp": -eye, "bm": eye}, "<=", smax - s)
    mismatch = {"up": eye, "um": -eye, "bp": -eye, "bm": eye, "C": rs.reshape(T, 1)}
    if mode == "free":
        bld.add("y", T)
        mismatch["y"] = -eye
        bld.rows_block(mismatch, "==", -s)
    else:
        y_fixed = s if mode == "raw" else s - peak_plan.b
        bld.rows_block(mismatch, "==", y_fixed - s)
    lp = bld.build(
        {
            "bp": -tariff.lambda_elec + tariff.lambda_b,
            "bm": tariff.lambda_elec + tariff.lambda_b,
            "D": -tariff.lambda_peak,
            "C": -tariff.lambda_c,
            "up": tariff.lambda_mis,
            "um": tariff.lambda_mis,
        },
        offset=tariff.lambda_elec * float(s.sum()) + tariff.lambda_peak * smax,
    )
    try:
        out = _solve(lp, opts, "joint")
    except SolverError as exc:
        if exc.status == "unbounded" and mode == "free":
            raise SolverError(
                "joint LP is unbounded in free baseline mode: the capacity payment exceeds the "
                "mismatch penalty that y >= 0 can enforce; use baseline_mode 'peak_plan' or "
                "'raw', or cap the bid with capacity_cap",
                "unbounded",
            ) from None
        raise
    C = out.x[bld.blocks["C"]][0]
    y = np.maximum(out.x[bld.blocks["y"]], 0.0) if mode == "free" else y_fixed
    dispatch = _dispatch(out.x, bld, battery, trace.t_s, C, y)
    return dispatch, bill_breakdown(trace, dispatch, rs, tariff)


def greedy_follow(r, C: float, battery: BatterySpec, t_s: float) -> np.ndarray:
    """Track ``C * r(t)`` step by step, clipped to the power cap and to what
    the SoC window allows at that step."""
    if C < 0:
        raise InputError("capacity bid C must be >= 0")
    rs = r.samples if isinstance(r, RegulationSeries) else as_series(r, "r")
    step = (t_s / 3600.0) / battery.energy_cap
    P = battery.power_cap
    soc = battery.soc_ini
    b = np.zeros(rs.size)
    for t, want in enumerate(C * rs):
        hi = min(P, (soc - battery.soc_min) / step)
        lo = max(-P, -(battery.soc_max - soc) / step)
        b[t] = min(max(want, lo), hi)
        soc -= b[t] * step
    return b

