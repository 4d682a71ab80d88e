"""Synthetic load traces with controlled peaks, and a synthetic regulation signal."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import InputError, RegulationSeries, TraceSeries

BASE_LOAD_MW = 1.0
DURATION_S = {"narrow": 120.0, "wide": 600.0}
APEX_MW = {"low": 1.33, "high": 2.0}
SHAPE_ALIASES = {"rect": "rectangular", "rectangular": "rectangular", "tri": "triangular", "triangular": "triangular"}


@dataclass(frozen=True)
class PeakCategory:
    """One of the eight peak classes, optionally repeated ``count`` times.

    ``gap_s`` is the length of the valley between consecutive peaks.
    """

    shape: str
    width: str
    height: str
    count: int = 1
    gap_s: float = 120.0

    def __post_init__(self):
        shape = SHAPE_ALIASES.get(self.shape)
        if shape is None:
            raise InputError(f"unknown peak shape {self.shape!r}")
        object.__setattr__(self, "shape", shape)
        if self.width not in DURATION_S:
            raise InputError(f"peak width must be one of {sorted(DURATION_S)}")
        if self.height not in APEX_MW:
            raise InputError(f"peak height must be one of {sorted(APEX_MW)}")
        if self.count < 1:
            raise InputError("count must be >= 1")
        if self.gap_s < 0:
            raise InputError("gap_s must be >= 0")

    @classmethod
    def parse(cls, text: str, count: int = 1, gap_s: float = 120.0) -> "PeakCategory":
        """Parse ``"rect.wide.low"`` / ``"triangular.narrow.high"``."""
        parts = text.split(".")
        if len(parts) != 3:
            raise InputError(f"category must look like 'rect.wide.low', got {text!r}")
        return cls(parts[0], parts[1], parts[2], count, gap_s)

    @property
    def label(self) -> str:
        name = f"{self.shape}.{self.width}.{self.height}"
        return name if self.count == 1 else f"{name}x{self.count}"

    @property
    def apex(self) -> float:
        return APEX_MW[self.height]

    def peak_steps(self, t_s: float) -> int:
        """Samples in one peak; triangles use an odd count so the apex is a sample."""
        n = math.ceil(DURATION_S[self.width] / t_s - 1e-9)
        if self.shape == "triangular" and n % 2 == 0:
            n += 1
        return n

    def gap_steps(self, t_s: float) -> int:
        return math.ceil(self.gap_s / t_s - 1e-9)


def _peak_profile(cat: PeakCategory, t_s: float) -> np.ndarray:
    n = cat.peak_steps(t_s)
    rise = cat.apex - BASE_LOAD_MW
    if cat.shape == "rectangular":
        return np.full(n, cat.apex)
    u = (np.arange(n) + 0.5) / n
    frac = 1.0 - np.abs(2.0 * u - 1.0)
    frac[n // 2] = 1.0
    return BASE_LOAD_MW + rise * frac


def synth_trace(
    category: PeakCategory,
    T: int = 180,
    t_s: float = 20.0,
    peak_position: int | None = None,
) -> TraceSeries:
    """Flat 1 MW base load with ``category.count`` identical peaks.

    ``peak_position`` is the index of the first peak sample; by default the
    peak group is centered in the horizon.
    """
    profile = _peak_profile(category, t_s)
    n, g = profile.size, category.gap_steps(t_s)
    if category.count > 1 and g < 1:
        raise InputError("gap_s must be at least one step when count > 1")
    span = category.count * n + (category.count - 1) * g
    start = (T - span) // 2 if peak_position is None else peak_position
    if start < 0 or start + span > T:
        raise InputError(f"peaks span {span} samples and do not fit in a horizon of {T} from index {start}")
    s = np.full(T, BASE_LOAD_MW)
    for k in range(category.count):
        a = start + k * (n + g)
        s[a : a + n] = profile
    return TraceSeries(s, t_s)


@dataclass(frozen=True)
class RegulationModel:
    """Clipped Gaussian random walk standing in for a RegD-style signal."""

    kind: str = "clipped-random-walk"
    step_sigma: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.kind != "clipped-random-walk":
            raise InputError(f"unknown regulation model {self.kind!r}")
        if not self.step_sigma > 0:
            raise InputError("step_sigma must be > 0")


def synth_regulation(model: RegulationModel, T: int, t_s: float = 20.0, rng=None) -> RegulationSeries:
    """``r(0) = 0``, then ``r(t+1) = clip(r(t) + sigma * eps_t, -1, 1)``.

    Draws come from ``rng`` when given, else from a generator seeded with
    ``model.seed``.
    """
    if T < 1:
        raise InputError("T must be >= 1")
    rng = np.random.default_rng(model.seed) if rng is None else rng
    eps = rng.standard_normal(T - 1) * model.step_sigma
    r = np.empty(T)
    r[0] = 0.0
    for t in range(1, T):
        r[t] = min(1.0, max(-1.0, r[t - 1] + eps[t - 1]))
    return RegulationSeries(r, t_s)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` under a master ``seed``."""
    return np.random.default_rng([seed, index])
