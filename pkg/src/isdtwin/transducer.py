"""Pressure-to-voltage transduction: DC (static) and AC (dynamic) channels.

The DC channel tracks the static model voltage at the instantaneous
pressure through a first-order lag whose time constant differs between
rising and falling targets.  The AC channel is derivative-driven: every
monotone pressure edge deposits one raised-cosine pulse, positive for
rising edges and negative for falling ones, whose peak follows the dynamic
model at the edge's pressure swing.

Charge-excitation (CE) gains multiply the finished channels at the output
stage.  The lag and the pulse deposition are linear, so this is equivalent
to scaling the targets, and it keeps the PCE/Off amplitude ratio exact in
floating point (a single multiply per sample).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _kernels
from .errors import ConfigError, DomainError, TraceFormatError
from .gradient import GradientStack, gradient_response
from .physics import (
    DynamicParams,
    PermittivityMode,
    StaticParams,
    dynamic_voltage,
    static_voltage,
)
from .trace import Channel, Trace


class CEMode(enum.Enum):
    OFF = "off"
    PCE = "pce"
    RCE = "rce"


@dataclass(frozen=True)
class CEState:
    """Charge-excitation pre-conditioning, modeled as persistent output gain.

    PCE and RCE share the same gain magnitudes; RCE flips the AC polarity.
    Gains are forced to 1 when the mode is Off.
    """

    mode: CEMode = CEMode.OFF
    static_gain: float = 25.4
    dynamic_gain: float = 15.2

    def __post_init__(self):
        if self.mode is CEMode.OFF:
            object.__setattr__(self, "static_gain", 1.0)
            object.__setattr__(self, "dynamic_gain", 1.0)
        else:
            if self.static_gain < 1 or self.dynamic_gain < 1:
                raise DomainError("CE gains must be >= 1 when excitation is on")

    @property
    def polarity(self) -> float:
        return -1.0 if self.mode is CEMode.RCE else 1.0


@dataclass(frozen=True)
class ResponseDynamics:
    """First-order response/recovery constants and output noise."""

    tau_rise_s: float = 0.03778
    tau_fall_s: float = 0.01957
    noise_rms_v: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.tau_rise_s <= 0 or self.tau_fall_s <= 0:
            raise DomainError("time constants must be positive")
        if self.noise_rms_v < 0:
            raise DomainError("noise_rms_v must be non-negative")


@dataclass(frozen=True)
class SensorParams:
    """Everything the transducer needs: models, optional gradient stack, CE.

    static_transfer, when given, overrides the closed-form static law as
    the DC target (pressure Pa -> volts, vectorized); the measured devices
    show voltage rising with pressure while the fixed-charge capacitor
    model predicts the opposite, so control demos feed the empirical fit
    here.  dynamic_transfer overrides the AC pulse-peak law the same way.
    """

    static: StaticParams = field(default_factory=StaticParams)
    dynamic: DynamicParams = field(default_factory=DynamicParams)
    stack: GradientStack | None = None
    ce: CEState = field(default_factory=CEState)
    perm_mode: PermittivityMode = PermittivityMode.CORRECTED
    static_transfer: Callable[[np.ndarray], np.ndarray] | None = None
    dynamic_transfer: Callable[[np.ndarray], np.ndarray] | None = None


def apply_charge_excitation(params: SensorParams, ce: CEState) -> SensorParams:
    """Return params with the given CE state installed; Off is identity."""
    return replace(params, ce=ce)


@dataclass(frozen=True)
class Edge:
    """One monotone pressure transition: center sample and signed swing."""

    index: int
    dp_pa: float


def detect_edges(pressure: np.ndarray, floor_rel: float = 1e-3) -> list[Edge]:
    """Monotone sign-runs of the pressure difference, with a relative floor.

    Runs whose total swing is below floor_rel times the trace's pressure
    range are ignored, so sample-level jitter does not spray pulses.
    """
    p = np.asarray(pressure, dtype=np.float64)
    if p.size < 2:
        return []
    span = float(p.max() - p.min())
    if span <= 0:
        return []
    floor = floor_rel * span
    d = np.diff(p)
    s = np.sign(d)
    change = np.flatnonzero(s[1:] != s[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [s.size]))
    edges = []
    for a, b in zip(starts, ends):
        if s[a] == 0:
            continue
        dp = float(p[b] - p[a])
        if abs(dp) < floor:
            continue
        edges.append(Edge(index=int(round((a + b) / 2)), dp_pa=dp))
    return edges


def _dc_target(params: SensorParams, P: np.ndarray) -> np.ndarray:
    if params.static_transfer is not None:
        return np.asarray(params.static_transfer(P), dtype=np.float64)
    if params.stack is not None:
        return np.asarray(
            gradient_response(params.stack, params.static, P, "static", params.perm_mode)
        )
    # The fixed-charge capacitor law only holds under contact; an unloaded
    # sensor has no transferred charge, so P = 0 targets 0 V, not Q/C(0).
    v = np.asarray(static_voltage(params.static, P))
    return np.where(P > 0, v, 0.0)


def _ac_peaks(params: SensorParams, swings: np.ndarray) -> np.ndarray:
    if params.dynamic_transfer is not None:
        return np.asarray(params.dynamic_transfer(swings), dtype=np.float64)
    if params.stack is not None:
        return np.asarray(
            gradient_response(params.stack, params.dynamic, swings, "dynamic", params.perm_mode)
        )
    return np.asarray(dynamic_voltage(params.dynamic, swings))


def _pulse_template(width_s: float, dt: float) -> np.ndarray:
    # Odd length so the peak lands exactly on the edge's center sample.
    half = max(int(round(width_s / (2.0 * dt))), 1)
    u = np.arange(2 * half + 1) / (2.0 * half)
    return np.sin(np.pi * u) ** 2


def _auto_width(edges: list[Edge], dt: float) -> float:
    # 0.4/f for periodic excitation: edges arrive at 2f, so the median
    # inter-edge gap is half a period and 0.8x that gap equals 0.4/f.
    if len(edges) >= 2:
        gaps = np.diff([e.index for e in edges]) * dt
        width = 0.8 * float(np.median(gaps))
        return min(max(width, 3.0 * dt), 0.25)
    return 0.025


@dataclass(frozen=True)
class SimResult:
    dc: Trace
    ac: Trace


def simulate(
    pressure: Trace,
    params: SensorParams,
    ce: CEState | None = None,
    dyn: ResponseDynamics | None = None,
    *,
    pulse_width_s: float | None = None,
    edge_floor_rel: float = 1e-3,
) -> SimResult:
    """Transduce a pressure trace into DC and AC voltage traces.

    Deterministic for a fixed seed.  Passing ce installs that CE state for
    this run; otherwise params.ce applies.
    """
    if pressure.channel is not Channel.PRESSURE_PA:
        raise TraceFormatError(f"expected a pressure trace, got {pressure.channel.value}")
    if pulse_width_s is not None and pulse_width_s <= 0:
        raise ConfigError("pulse_width_s must be positive")
    if not 0 < edge_floor_rel < 1:
        raise ConfigError("edge_floor_rel must be in (0, 1)")
    if ce is not None:
        params = apply_charge_excitation(params, ce)
    if dyn is None:
        dyn = ResponseDynamics()

    p = pressure.samples
    dt = pressure.dt

    target = _dc_target(params, p)
    k_rise = 1.0 - np.exp(-dt / dyn.tau_rise_s)
    k_fall = 1.0 - np.exp(-dt / dyn.tau_fall_s)
    dc = _kernels.track_asymmetric(target, 0.0, k_rise, k_fall)

    edges = detect_edges(p, edge_floor_rel)
    ac = np.zeros_like(p)
    if edges:
        width = pulse_width_s if pulse_width_s is not None else _auto_width(edges, dt)
        template = _pulse_template(width, dt)
        half = (template.size - 1) // 2
        swings = np.array([abs(e.dp_pa) for e in edges])
        peaks = _ac_peaks(params, swings)
        for e, pk in zip(edges, peaks):
            lo = e.index - half
            hi = e.index + half + 1
            a, b = max(lo, 0), min(hi, p.size)
            ac[a:b] += np.copysign(pk, e.dp_pa) * template[a - lo : b - lo]

    # Output-stage CE gains; a single multiply keeps PCE/Off ratios exact.
    dc = dc * params.ce.static_gain
    ac = ac * (params.ce.polarity * params.ce.dynamic_gain)

    if dyn.noise_rms_v > 0:
        rng = np.random.Generator(np.random.PCG64(dyn.seed))
        dc = dc + rng.normal(0.0, dyn.noise_rms_v, p.size)
        ac = ac + rng.normal(0.0, dyn.noise_rms_v, p.size)

    return SimResult(
        dc=Trace(pressure.t0, dt, dc, Channel.VOLTAGE_DC),
        ac=Trace(pressure.t0, dt, ac, Channel.VOLTAGE_AC),
    )
