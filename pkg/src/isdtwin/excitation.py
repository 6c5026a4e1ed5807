"""Synthetic pressure excitation: square, sine, weight steps, taps, constant."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .physics import G_STANDARD
from .trace import Channel, Trace


class ExcitationKind(enum.Enum):
    SQUARE = "square"
    SINE = "sine"
    WEIGHT_STEPS = "weight_steps"
    TAP_TRAIN = "tap_train"
    CONSTANT = "constant"


@dataclass(frozen=True)
class WeightStep:
    """One mass placed on the device for a duration."""

    mass_kg: float
    duration_s: float


@dataclass(frozen=True)
class ExcitationSpec:
    """Parameters of one generated pressure trace.

    frequency_hz applies to Square, Sine and TapTrain; steps and
    device_area_m2 apply to WeightSteps.  noise_rms_pa adds seeded
    Gaussian noise, clipped so pressure stays non-negative.
    """

    kind: ExcitationKind
    amplitude_pa: float = 0.0
    frequency_hz: float = 0.0
    duty: float = 0.5
    duration_s: float = 1.0
    sample_rate_hz: float = 1000.0
    steps: tuple[WeightStep, ...] = ()
    device_area_m2: float = 0.0
    tap_width_s: float = 0.030
    noise_rms_pa: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.sample_rate_hz <= 0:
            raise ConfigError("sample_rate_hz must be positive")
        if self.amplitude_pa < 0:
            raise ConfigError("amplitude_pa must be non-negative")
        if self.noise_rms_pa < 0:
            raise ConfigError("noise_rms_pa must be non-negative")
        if not 0 < self.duty < 1:
            raise ConfigError("duty must be in (0, 1)")
        periodic = (ExcitationKind.SQUARE, ExcitationKind.SINE, ExcitationKind.TAP_TRAIN)
        if self.kind in periodic:
            if self.frequency_hz <= 0:
                raise ConfigError(f"{self.kind.value} requires frequency_hz > 0")
            if self.sample_rate_hz < 20 * self.frequency_hz:
                raise ConfigError("sample_rate_hz must be at least 20x frequency_hz")
        if self.kind is ExcitationKind.WEIGHT_STEPS:
            if not self.steps:
                raise ConfigError("weight_steps requires a non-empty step schedule")
            if self.device_area_m2 <= 0:
                raise ConfigError("weight_steps requires device_area_m2 > 0")
            for s in self.steps:
                if s.mass_kg < 0 or s.duration_s <= 0:
                    raise ConfigError("each step needs mass_kg >= 0 and duration_s > 0")
        if self.kind is ExcitationKind.TAP_TRAIN:
            if self.tap_width_s <= 0:
                raise ConfigError("tap_width_s must be positive")
            if self.tap_width_s > 1.0 / self.frequency_hz:
                raise ConfigError("tap_width_s must not exceed the tap period")


def _square(spec: ExcitationSpec, t: np.ndarray) -> np.ndarray:
    # Each period starts unloaded and spends its trailing `duty` fraction
    # pressed, so a trace always begins with a clean rising edge.
    phase = np.mod(t * spec.frequency_hz, 1.0)
    return np.where(phase >= 1.0 - spec.duty, spec.amplitude_pa, 0.0)


def _sine(spec: ExcitationSpec, t: np.ndarray) -> np.ndarray:
    # Offset so pressure is non-negative: the exciter presses, never pulls.
    return spec.amplitude_pa * 0.5 * (1.0 - np.cos(2.0 * np.pi * spec.frequency_hz * t))


def _weight_steps(spec: ExcitationSpec, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    t_edge = 0.0
    for s in spec.steps:
        p = s.mass_kg * G_STANDARD / spec.device_area_m2
        out[(t >= t_edge) & (t < t_edge + s.duration_s)] = p
        t_edge += s.duration_s
    return out


def _tap_train(spec: ExcitationSpec, t: np.ndarray) -> np.ndarray:
    # Raised-cosine pulses centered mid-period.
    out = np.zeros_like(t)
    period = 1.0 / spec.frequency_hz
    w = spec.tap_width_s
    n_taps = int(np.floor(spec.duration_s / period))
    for i in range(n_taps):
        c = (i + 0.5) * period
        sel = (t >= c - w / 2) & (t <= c + w / 2)
        u = (t[sel] - (c - w / 2)) / w
        out[sel] = spec.amplitude_pa * 0.5 * (1.0 - np.cos(2.0 * np.pi * u))
    return out


def generate(spec: ExcitationSpec) -> Trace:
    """Generate the pressure trace described by spec; bit-reproducible."""
    n = max(int(round(spec.duration_s * spec.sample_rate_hz)), 1)
    dt = 1.0 / spec.sample_rate_hz
    t = dt * np.arange(n)
    if spec.kind is ExcitationKind.SQUARE:
        p = _square(spec, t)
    elif spec.kind is ExcitationKind.SINE:
        p = _sine(spec, t)
    elif spec.kind is ExcitationKind.WEIGHT_STEPS:
        p = _weight_steps(spec, t)
    elif spec.kind is ExcitationKind.TAP_TRAIN:
        p = _tap_train(spec, t)
    elif spec.kind is ExcitationKind.CONSTANT:
        p = np.full_like(t, spec.amplitude_pa)
    else:
        raise ConfigError(f"unknown excitation kind: {spec.kind!r}")
    if spec.noise_rms_pa > 0:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        p = p + rng.normal(0.0, spec.noise_rms_pa, size=n)
    np.clip(p, 0.0, None, out=p)
    return Trace(0.0, dt, p, Channel.PRESSURE_PA)
