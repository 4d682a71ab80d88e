"""Bill arithmetic for one planning window."""

from __future__ import annotations

import numpy as np

from .domain import (
    BatterySpec,
    BillBreakdown,
    DispatchSolution,
    InputError,
    Tariff,
    TraceSeries,
    as_series,
    check_dispatch,
)


def energy_cost(grid, tariff: Tariff) -> float:
    return float(tariff.lambda_elec * np.sum(as_series(grid, "grid")))


def peak_cost(grid, tariff: Tariff) -> float:
    grid = as_series(grid, "grid")
    if grid.size == 0:
        raise InputError("peak_cost of an empty series")
    return float(tariff.lambda_peak * grid.max())


def battery_cost(b, tariff: Tariff) -> float:
    return float(tariff.lambda_b * np.sum(np.abs(as_series(b, "b"))))


def mismatch_penalty(b, C: float, r, y, s, tariff: Tariff) -> float:
    """``lambda_mis * sum |-s + b + y - C r|``: deviation of the measured
    regulation response from the instructed one."""
    b, r, y, s = (as_series(v, n) for v, n in ((b, "b"), (r, "r"), (y, "y"), (s, "s")))
    if not (b.size == r.size == y.size == s.size):
        raise InputError("b, r, y and s must have equal length")
    return float(tariff.lambda_mis * np.sum(np.abs(-s + b + y - C * r)))


def baseline_bill(trace: TraceSeries, tariff: Tariff) -> float:
    """Bill with the battery idle."""
    return energy_cost(trace.samples, tariff) + peak_cost(trace.samples, tariff)


def regulation_revenue(b, C: float, r, tariff: Tariff) -> float:
    b, r = as_series(b, "b"), as_series(r, "r")
    if b.size != r.size:
        raise InputError(f"b has {b.size} samples but r has {r.size}")
    if C < 0:
        raise InputError("capacity bid C must be >= 0")
    return float(
        tariff.lambda_c * C
        - tariff.lambda_mis * np.sum(np.abs(b - C * r))
        - tariff.lambda_b * np.sum(np.abs(b))
    )


def bill_breakdown(
    trace: TraceSeries,
    dispatch: DispatchSolution,
    r,
    tariff: Tariff,
    battery: BatterySpec | None = None,
) -> BillBreakdown:
    """Itemize the bill of ``dispatch``; the mismatch uses the baseline ``dispatch.y``.

    With ``battery`` given, the dispatch is checked first and an infeasible
    one raises :class:`~dcbattery.domain.InfeasibleDispatch`.
    """
    s = trace.samples
    r = as_series(r, "r")
    if not (dispatch.b.size == s.size == r.size):
        raise InputError(f"length mismatch: trace {s.size}, dispatch {dispatch.b.size}, r {r.size}")
    if battery is not None:
        check_dispatch(dispatch.b, battery, trace.t_s)
    grid = s - dispatch.b
    return BillBreakdown(
        energy_cost=energy_cost(grid, tariff),
        peak_cost=peak_cost(grid, tariff),
        battery_cost=battery_cost(dispatch.b, tariff),
        mismatch_penalty=mismatch_penalty(dispatch.b, dispatch.C, r, dispatch.y, s, tariff),
        capacity_revenue=float(tariff.lambda_c * dispatch.C),
    )


def amortize_peak_price(monthly_price: float, hours_per_month: float) -> float:
    """Spread a monthly $/MW demand charge over the hours of the month."""
    if not (monthly_price > 0 and hours_per_month > 0):
        raise InputError("monthly price and hours per month must be positive")
    return monthly_price / hours_per_month
