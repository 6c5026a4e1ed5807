"""Layered-sponge gradient stack: progressive contact-area engagement.

The stack is a stepped pyramid of conductive sponge layers, smallest on
top.  Only the outermost engaged face touches the film, so the contact
area is the footprint of the deepest layer whose engagement pressure has
been reached, not a cumulative sum.  Engagement boosts low-pressure
response two ways: the static model sees a small (high-voltage) plate
area, and the dynamic model sees the device force concentrated onto the
small engaged footprint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import physics
from .errors import DomainError
from .physics import DynamicParams, PermittivityMode, StaticParams


@dataclass(frozen=True)
class Layer:
    """One sponge layer: contact footprint and the pressure that engages it."""

    area_m2: float
    engage_pressure_pa: float


@dataclass(frozen=True)
class GradientStack:
    """Ordered layers, top (smallest footprint, engages first) to bottom.

    smoothing is the fraction of the gap to the previous threshold used as
    a linear blend window below each threshold, keeping the response
    continuous in pressure.
    """

    layers: tuple[Layer, ...]
    layer_thickness_m: float = 2.0e-3
    smoothing: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.layer_thickness_m <= 0:
            raise DomainError("layer_thickness_m must be positive")
        if not 0 <= self.smoothing < 1:
            raise DomainError("smoothing must be in [0, 1)")
        prev_a, prev_p = 0.0, -np.inf
        for lay in self.layers:
            if lay.area_m2 <= prev_a:
                raise DomainError("layer areas must be strictly increasing top to bottom")
            if lay.engage_pressure_pa <= prev_p:
                raise DomainError("engage pressures must be strictly increasing top to bottom")
            prev_a, prev_p = lay.area_m2, lay.engage_pressure_pa
        if self.layers and self.layers[0].engage_pressure_pa < 0:
            raise DomainError("first engage pressure must be >= 0")

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([l.engage_pressure_pa for l in self.layers])

    @property
    def areas(self) -> np.ndarray:
        return np.array([l.area_m2 for l in self.layers])

    @property
    def full_area(self) -> float:
        """Footprint of the bottom layer; 0 for an empty stack."""
        return self.layers[-1].area_m2 if self.layers else 0.0


def default_stack() -> GradientStack:
    """Five-layer stack: 0.9/1.8/2.7/3.6/4.5 cm widths on a 4.5 cm length.

    Engagement thresholds are spaced uniformly over the 6 Pa - 3.6 kPa
    operating band; the sponge stiffness needed to derive them physically
    is not available, so they are calibration points.
    """
    widths_cm = (0.9, 1.8, 2.7, 3.6, 4.5)
    pressures = np.linspace(6.0, 3600.0, len(widths_cm))
    layers = tuple(
        Layer(area_m2=w * 4.5 * 1e-4, engage_pressure_pa=float(p))
        for w, p in zip(widths_cm, pressures)
    )
    return GradientStack(layers)


def engaged_area(stack: GradientStack, P) -> float | np.ndarray:
    """Footprint of the deepest engaged layer at pressure P, in m^2.

    Piecewise constant, monotone non-decreasing, 0 below the first
    threshold, saturating at the bottom-layer area.
    """
    Pa = np.asarray(P, dtype=np.float64)
    if np.any(Pa < 0):
        raise DomainError("pressure must be non-negative")
    if not stack.layers:
        out = np.zeros_like(Pa)
        return float(out) if np.ndim(P) == 0 else out
    idx = np.searchsorted(stack.thresholds, Pa, side="right") - 1
    areas = np.concatenate(([0.0], stack.areas))
    out = areas[idx + 1]
    return float(out) if np.ndim(P) == 0 else out


def _level_voltage(stack, base, level, Pa, mode, perm_mode):
    """Model voltage with the area of layer `level` engaged (-1: none)."""
    if level < 0:
        return np.zeros_like(Pa)
    area = stack.areas[level]
    if mode == "static":
        p = StaticParams(
            Q=base.Q,
            alpha=base.alpha,
            beta=base.beta,
            geometry=physics.Geometry(
                A0=area,
                d=base.geometry.d,
                x=base.geometry.x,
                eps_r=base.geometry.eps_r,
            ),
        )
        return np.asarray(physics.static_voltage(p, Pa))
    # Dynamic: the device-level force concentrates on the engaged
    # footprint, so charge density is driven by the local pressure
    # P * A_full / A_engaged.  At full engagement this reduces to the
    # plain model.
    local = Pa * (stack.full_area / area)
    return np.asarray(physics.dynamic_peak_voltage(base, local, perm_mode))


def gradient_response(
    stack: GradientStack,
    base: StaticParams | DynamicParams,
    P,
    mode: str,
    perm_mode: PermittivityMode = PermittivityMode.CORRECTED,
) -> float | np.ndarray:
    """Voltage of the gradient device at pressure P (Pa), either mode.

    Engagement levels switch with pressure; within a blend window of
    width smoothing * (gap to previous threshold) below each threshold
    the output is a linear voltage blend between the adjacent levels, so
    the response is continuous.  The blend is done on voltages rather
    than areas: the static voltage diverges as area tends to zero, so an
    area-space ramp would not stay bounded at first engagement.
    """
    if mode not in ("static", "dynamic"):
        raise DomainError(f"mode must be 'static' or 'dynamic', got {mode!r}")
    if mode == "static" and not isinstance(base, StaticParams):
        raise DomainError("static mode requires StaticParams")
    if mode == "dynamic" and not isinstance(base, DynamicParams):
        raise DomainError("dynamic mode requires DynamicParams")
    Pa = np.asarray(P, dtype=np.float64)
    if np.any(Pa < 0):
        raise DomainError("pressure must be non-negative")
    if not stack.layers:
        out = np.zeros_like(Pa)
        return float(out) if np.ndim(P) == 0 else out

    thr = stack.thresholds
    idx = np.searchsorted(thr, Pa, side="right") - 1
    out = np.empty_like(Pa)
    for level in np.unique(idx):
        sel = idx == level
        out[sel] = _level_voltage(stack, base, level, Pa[sel], mode, perm_mode)

    # Blend windows sit just below each threshold: over [b - w, b) the
    # output fades linearly from the lower level to the level engaged at b.
    prev = np.concatenate(([0.0], thr[:-1]))
    widths = stack.smoothing * (thr - prev)
    for j, (b, w) in enumerate(zip(thr, widths)):
        if w <= 0:
            continue
        sel = (Pa >= b - w) & (Pa < b)
        if not np.any(sel):
            continue
        lam = (Pa[sel] - (b - w)) / w
        lo = _level_voltage(stack, base, j - 1, Pa[sel], mode, perm_mode)
        hi = _level_voltage(stack, base, j, Pa[sel], mode, perm_mode)
        out[sel] = (1.0 - lam) * lo + lam * hi

    return float(out) if np.ndim(P) == 0 else out
