"""Core value types: load and regulation traces, battery, tariff, dispatch, bills.

Conventions used throughout the package:

* power in MW, energy in MWh, money in $;
* ``b > 0`` means the battery discharges into the data center, which lowers
  the stored energy;
* step lengths are given in seconds and converted to hours once, so that
  ``b * dt_hours`` is MWh;
* ``Tariff.lambda_elec``, ``lambda_b`` and ``lambda_mis`` are per MW per step,
  i.e. the step length is already folded into them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SOC_TOL = 1e-9
GAIN_GUARD = 1e-9


class InputError(ValueError):
    """Raised for malformed or out-of-range inputs."""


class InfeasibleDispatch(InputError):
    """A dispatch violates the battery power or SoC limits."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def as_series(values, name: str = "series") -> np.ndarray:
    """Copy ``values`` into a read-only 1-D float array, rejecting NaN/inf."""
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InputError(f"{name}: non-finite value at index {bad}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TraceSeries:
    """Data-center load ``s(t)`` in MW sampled every ``t_s`` seconds."""

    samples: np.ndarray
    t_s: float
    start_time: float = 0.0

    def __post_init__(self):
        arr = as_series(self.samples, "trace")
        if arr.size < 1:
            raise InputError("trace must contain at least one sample")
        if np.any(arr < 0):
            raise InputError(f"trace: negative power at index {int(np.flatnonzero(arr < 0)[0])}")
        if not self.t_s > 0:
            raise InputError("t_s must be positive")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def dt_hours(self) -> float:
        return self.t_s / 3600.0


@dataclass(frozen=True)
class RegulationSeries:
    """Normalized regulation signal ``r(t)`` in [-1, 1]."""

    samples: np.ndarray
    t_s: float
    start_time: float = 0.0

    def __post_init__(self):
        arr = as_series(self.samples, "regulation")
        if np.any(np.abs(arr) > 1.0):
            bad = int(np.flatnonzero(np.abs(arr) > 1.0)[0])
            raise InputError(f"regulation: value {arr[bad]} outside [-1, 1] at index {bad}")
        if not self.t_s > 0:
            raise InputError("t_s must be positive")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class BatterySpec:
    """Battery power cap (MW), energy cap (MWh) and SoC window (fractions of E)."""

    power_cap: float
    energy_cap: float
    soc_ini: float = 0.5
    soc_min: float = 0.0
    soc_max: float = 1.0

    def __post_init__(self):
        values = (self.power_cap, self.energy_cap, self.soc_ini, self.soc_min, self.soc_max)
        if not all(math.isfinite(v) for v in values):
            raise InputError("battery parameters must be finite")
        if self.power_cap < 0:
            raise InputError("power_cap must be >= 0")
        if self.energy_cap <= 0:
            raise InputError("energy_cap must be > 0")
        if not 0.0 <= self.soc_min <= self.soc_ini <= self.soc_max <= 1.0:
            raise InputError("need 0 <= soc_min <= soc_ini <= soc_max <= 1")


@dataclass(frozen=True)
class Tariff:
    """Price coefficients.

    ``lambda_elec``, ``lambda_b`` and ``lambda_mis`` multiply per-step MW
    values directly (step length folded in); ``lambda_peak`` is $/MW for the
    window (amortized hourly); ``lambda_c`` is $/MW of capacity per window.
    """

    lambda_elec: float = 0.0
    lambda_peak: float = 0.0
    lambda_c: float = 0.0
    lambda_b: float = 0.0
    lambda_mis: float = 0.0

    def __post_init__(self):
        for name in ("lambda_elec", "lambda_peak", "lambda_c", "lambda_b", "lambda_mis"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v}")

    @classmethod
    def from_prices(
        cls,
        t_s: float,
        energy_per_mwh: float = 0.0,
        peak_per_mw: float = 0.0,
        capacity_per_mw: float = 0.0,
        degradation_per_mwh: float = 0.0,
        mismatch_per_mwh: float = 0.0,
    ) -> "Tariff":
        """Fold the step length into the per-MWh prices."""
        dt = t_s / 3600.0
        return cls(
            lambda_elec=energy_per_mwh * dt,
            lambda_peak=peak_per_mw,
            lambda_c=capacity_per_mw,
            lambda_b=degradation_per_mwh * dt,
            lambda_mis=mismatch_per_mwh * dt,
        )


def soc_trajectory(b, battery: BatterySpec, t_s: float) -> np.ndarray:
    """State of charge after each step; discharge (b > 0) lowers it.

    Bounds are not enforced here; see :func:`check_dispatch`.
    """
    b = as_series(b, "dispatch")
    return battery.soc_ini - np.cumsum(b) * (t_s / 3600.0) / battery.energy_cap


def check_dispatch(b, battery: BatterySpec, t_s: float, tol: float = SOC_TOL) -> np.ndarray:
    """Return the SoC trajectory or raise :class:`InfeasibleDispatch` at the first bad step."""
    b = as_series(b, "dispatch")
    soc = soc_trajectory(b, battery, t_s)
    power_bad = np.abs(b) > battery.power_cap + tol
    soc_bad = (soc < battery.soc_min - tol) | (soc > battery.soc_max + tol)
    bad = power_bad | soc_bad
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        if power_bad[i]:
            msg = f"|b[{i}]| = {abs(b[i]):.6g} exceeds power cap {battery.power_cap}"
        else:
            msg = f"soc[{i}] = {soc[i]:.6g} outside [{battery.soc_min}, {battery.soc_max}]"
        raise InfeasibleDispatch(msg, i)
    return soc


@dataclass(frozen=True)
class DispatchSolution:
    """Battery schedule ``b``, capacity bid ``C``, reported baseline ``y`` and SoC path."""

    b: np.ndarray
    C: float
    y: np.ndarray
    soc: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", as_series(self.b, "b"))
        object.__setattr__(self, "y", as_series(self.y, "y"))
        object.__setattr__(self, "soc", as_series(self.soc, "soc"))
        if not self.C >= 0:
            raise InputError("capacity bid C must be >= 0")
        if not (self.b.size == self.y.size == self.soc.size):
            raise InputError("b, y and soc must have equal length")


@dataclass(frozen=True)
class BillBreakdown:
    """Itemized bill for one window. ``total`` is derived from the components."""

    energy_cost: float
    peak_cost: float
    battery_cost: float = 0.0
    mismatch_penalty: float = 0.0
    capacity_revenue: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        total = (
            self.energy_cost
            + self.peak_cost
            + self.battery_cost
            + self.mismatch_penalty
            - self.capacity_revenue
        )
        object.__setattr__(self, "total", float(total))

    @property
    def regulation_revenue(self) -> float:
        """Net regulation revenue: capacity payment less mismatch and wear."""
        return self.capacity_revenue - self.mismatch_penalty - self.battery_cost

    def as_dict(self) -> dict:
        return {
            "energy_cost": self.energy_cost,
            "peak_cost": self.peak_cost,
            "battery_cost": self.battery_cost,
            "mismatch_penalty": self.mismatch_penalty,
            "capacity_revenue": self.capacity_revenue,
            "total": self.total,
        }


@dataclass(frozen=True)
class GainReport:
    """Bills of the four scenarios and the superlinear-saving ratio ``q``."""

    J: float
    J_p: float
    J_r: float
    J_star: float
    q: float
    superlinear: bool
    bills: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_bills(cls, J, J_p, J_r, J_star, bills=None) -> "GainReport":
        from .gain import superlinear_ratio

        q = superlinear_ratio(J, J_p, J_r, J_star)
        return cls(float(J), float(J_p), float(J_r), float(J_star), q, q > 0, bills or {})

    @property
    def savings(self) -> tuple[float, float, float]:
        """(peak-only, regulation-only, joint) savings relative to ``J``."""
        return self.J - self.J_p, self.J - self.J_r, self.J - self.J_star
