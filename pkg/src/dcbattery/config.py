"""Flat ``key = value`` configuration files.

Prices are given in natural units ($/MWh, $/MW-month, $/MW per hour) and
converted to per-step coefficients for a trace's step length. Keys missing
from the file keep the defaults below and are listed as defaulted in reports;
in particular the battery defaults (P = trace peak, E = P/6 MWh) are
placeholders, not measured values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .billing import amortize_peak_price
from .domain import BatterySpec, InputError, Tariff, TraceSeries
from .optimizers import SolveOptions
from .synth import RegulationModel

_KEYS = {
    "lambda_elec": "lambda_elec",
    "lambda_peak_monthly": "lambda_peak_monthly",
    "hours_per_month": "hours_per_month",
    "lambda_c": "lambda_c",
    "lambda_b": "lambda_b",
    "lambda_mis": "lambda_mis",
    "battery.p_mw": "battery_p_mw",
    "battery.e_mwh": "battery_e_mwh",
    "battery.soc_ini": "soc_ini",
    "battery.soc_min": "soc_min",
    "battery.soc_max": "soc_max",
    "f": "f",
    "nocp_gap_s": "nocp_gap_s",
    "baseline_mode": "baseline_mode",
    "net_energy_zero": "net_energy_zero",
    "capacity_cap": "capacity_cap",
    "solver.tol": "solver_tol",
    "solver.rule": "solver_rule",
    "reg_model.sigma": "reg_sigma",
    "seed": "seed",
    "workers": "workers",
}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class Config:
    lambda_elec: float = 50.0
    lambda_peak_monthly: float = 20000.0
    hours_per_month: float = 730.0
    lambda_c: float = 40.0
    lambda_b: float = 10.0
    lambda_mis: float = 100.0
    battery_p_mw: float | None = None
    battery_e_mwh: float | None = None
    soc_ini: float = 0.5
    soc_min: float = 0.2
    soc_max: float = 0.9
    f: float = 0.2
    nocp_gap_s: float = 120.0
    baseline_mode: str = "peak_plan"
    net_energy_zero: bool = True
    capacity_cap: float = 1.0
    solver_tol: float = 1e-8
    solver_rule: str = "dantzig"
    reg_sigma: float = 0.3
    seed: int = 0
    workers: int = 1
    given: set[str] = field(default_factory=set, repr=False)

    def tariff(self, t_s: float) -> Tariff:
        return Tariff.from_prices(
            t_s,
            energy_per_mwh=self.lambda_elec,
            peak_per_mw=amortize_peak_price(self.lambda_peak_monthly, self.hours_per_month),
            capacity_per_mw=self.lambda_c,
            degradation_per_mwh=self.lambda_b,
            mismatch_per_mwh=self.lambda_mis,
        )

    def battery(self, trace: TraceSeries | None = None) -> BatterySpec:
        p = self.battery_p_mw
        if p is None:
            if trace is None:
                raise InputError("battery.p_mw is not configured and no trace is available to size it")
            p = float(trace.samples.max())
        e = self.battery_e_mwh if self.battery_e_mwh is not None else p / 6.0
        return BatterySpec(p, e, self.soc_ini, self.soc_min, self.soc_max)

    def solve_options(self, dump_lp: str | None = None) -> SolveOptions:
        return SolveOptions(
            net_energy_zero=self.net_energy_zero,
            baseline_mode=self.baseline_mode,
            capacity_cap=self.capacity_cap,
            rule=self.solver_rule,
            tol=self.solver_tol,
            dump_lp=dump_lp,
        )

    def reg_model(self) -> RegulationModel:
        return RegulationModel(step_sigma=self.reg_sigma, seed=self.seed)

    def echo(self, battery: BatterySpec | None = None) -> dict:
        """Values for the report header, with defaulted keys listed."""
        out = {k: v for k, v in asdict(self).items() if k != "given"}
        if math.isinf(out["capacity_cap"]):
            out["capacity_cap"] = None
        if battery is not None:
            out["battery_p_mw"] = battery.power_cap
            out["battery_e_mwh"] = battery.energy_cap
        out["defaulted"] = sorted(k for k, attr in _KEYS.items() if attr not in self.given)
        return out


def _coerce(attr: str, raw: str, where: str):
    kind = {f.name: f.type for f in fields(Config)}[attr]
    try:
        if kind == "bool":
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "str":
            return raw
        return float(raw)
    except ValueError:
        raise InputError(f"{where}: bad value {raw!r} for {attr}") from None


def parse_config(text: str, source: str = "<config>") -> Config:
    cfg = Config()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        attr = _KEYS.get(key)
        if attr is None:
            raise InputError(f"{source}:{lineno}: unknown key {key!r}")
        setattr(cfg, attr, _coerce(attr, raw, f"{source}:{lineno}"))
        cfg.given.add(attr)
    # validate eagerly so bad files fail before any solving
    SolveOptions(baseline_mode=cfg.baseline_mode, capacity_cap=cfg.capacity_cap, rule=cfg.solver_rule)
    if cfg.solver_rule not in ("dantzig", "bland"):
        raise InputError(f"{source}: solver.rule must be 'dantzig' or 'bland'")
    if not 0 <= cfg.f <= 1:
        raise InputError(f"{source}: f must be in [0, 1]")
    return cfg


def load_config(path) -> Config:
    if path is None:
        return Config()
    path = Path(path)
    return parse_config(path.read_text(), str(path))
