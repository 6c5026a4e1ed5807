"""Uniformly sampled time series container used by every pipeline stage."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import TraceFormatError


class Channel(enum.Enum):
    """Physical channel of a trace; values double as CSV column names."""

    PRESSURE_PA = "pressure_pa"
    VOLTAGE_DC = "voltage_dc_v"
    VOLTAGE_AC = "voltage_ac_v"
    CURRENT_A = "current_a"
    CHARGE_C = "charge_c"


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled series: sample i sits at ``t0 + i * dt``.

    The sample array is copied on construction and marked read-only, so a
    Trace can be shared freely between threads.
    """

    t0: float
    dt: float
    samples: np.ndarray
    channel: Channel

    def __post_init__(self):
        if self.dt <= 0:
            raise TraceFormatError(f"dt must be positive, got {self.dt}")
        arr = np.array(self.samples, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise TraceFormatError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise TraceFormatError("samples contain non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        if not isinstance(self.channel, Channel):
            object.__setattr__(self, "channel", Channel(self.channel))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.n * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def rate(self) -> float:
        return 1.0 / self.dt

    def index_at(self, t: float) -> int:
        """Index of the sample closest to time t, clipped to the trace."""
        i = int(round((t - self.t0) / self.dt))
        return min(max(i, 0), self.n - 1)

    def value_at(self, t: float) -> float:
        """Linearly interpolated value at time t (clamped at the ends)."""
        x = (t - self.t0) / self.dt
        if x <= 0:
            return float(self.samples[0])
        if x >= self.n - 1:
            return float(self.samples[-1])
        i = int(x)
        frac = x - i
        return float(self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac)

    def resample(self, dt: float, n: int | None = None) -> "Trace":
        """Linear resampling onto a new uniform grid starting at t0."""
        if n is None:
            n = max(int(round(self.duration / dt)), 1)
        new_t = self.t0 + dt * np.arange(n)
        vals = np.interp(new_t, self.times, self.samples)
        return Trace(self.t0, dt, vals, self.channel)

    def with_samples(self, samples: np.ndarray, channel: Channel | None = None) -> "Trace":
        """New trace on the same time base with different samples."""
        return Trace(self.t0, self.dt, samples, channel or self.channel)
