"""Closed-form device models for the dual-mode triboelectric pressure sensor.

Two families of equations live here.  The static family treats the contacting
stack as a parallel-plate capacitor whose area grows and whose dielectric
thins under load, so a fixed transferred charge Q maps pressure to a DC
voltage.  The dynamic family describes contact-separation cycling: surface
charge density saturates exponentially with pressure and the per-cycle peak
voltage follows from the minimum (fully separated) capacitance.

All functions are pure, accept scalar or ndarray pressures in Pa, and return
the matching shape.  Sensitivities are signed derivatives; callers wanting
magnitudes take ``abs``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: Vacuum permittivity (F/m), CODATA 2018. Fixed, never a fit parameter.
EPS0 = 8.8541878128e-12

#: Standard gravity (m/s^2) for mass-to-pressure conversion.
G_STANDARD = 9.80665


class PermittivityMode(enum.Enum):
    """Which form of the effective-permittivity relation to evaluate.

    CORRECTED is the physically consistent series dielectric-air stack.
    FILM_WEIGHTED repeats the film thickness fraction where the air
    fraction belongs, an empirical fitting form retained so the two
    variants can be compared side by side.
    """

    CORRECTED = "corrected"
    FILM_WEIGHTED = "film_weighted"


@dataclass(frozen=True)
class Geometry:
    """Plate geometry shared by both model families.

    Parameters
    ----------
    A0 : float
        Initial contact area (m^2). Default is the 4 cm x 4 cm electrode.
    d : float
        Dielectric film thickness (m).
    x : float
        Preset separation gap for dynamic operation (m).
    eps_r : float
        Relative permittivity of the film.
    """

    A0: float = 1.6e-3
    d: float = 5.0e-4
    x: float = 1.0e-3
    eps_r: float = 2.0

    def __post_init__(self):
        if self.A0 <= 0:
            raise DomainError(f"A0 must be positive, got {self.A0}")
        if self.d <= 0:
            raise DomainError(f"d must be positive, got {self.d}")
        if self.x < 0:
            raise DomainError(f"x must be non-negative, got {self.x}")
        if self.eps_r < 1:
            raise DomainError(f"eps_r must be >= 1, got {self.eps_r}")


@dataclass(frozen=True)
class StaticParams:
    """Static (sustained-contact) model parameters.

    Q is the transferred charge held on the plates; alpha and beta are the
    empirical area-expansion (m^2/Pa) and thickness-compression (m/Pa)
    coefficients.
    """

    Q: float = 1.0e-9
    alpha: float = 0.0
    beta: float = 0.0
    geometry: Geometry = field(default_factory=Geometry)

    def __post_init__(self):
        if self.Q == 0:
            raise DomainError("Q must be non-zero (either sign)")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")

    @property
    def p_crush(self) -> float:
        """Pressure at which the dielectric would be fully compressed."""
        return np.inf if self.beta == 0 else self.geometry.d / self.beta


@dataclass(frozen=True)
class DynamicParams:
    """Dynamic (contact-separation) model parameters.

    sigma0 is the saturation surface charge density (C/m^2) and m its
    pressure constant (1/Pa); V_max and k are the saturation voltage (V)
    and sensitivity constant (1/Pa) of the empirical voltage law.
    """

    sigma0: float = 1.0e-5
    m: float = 5.0e-4
    V_max: float = 163.6
    k: float = 5.0e-4
    geometry: Geometry = field(default_factory=Geometry)

    def __post_init__(self):
        if self.sigma0 < 0:
            raise DomainError(f"sigma0 must be >= 0, got {self.sigma0}")
        if self.m <= 0:
            raise DomainError(f"m must be positive, got {self.m}")
        if self.V_max < 0:
            raise DomainError(f"V_max must be >= 0, got {self.V_max}")
        if self.k <= 0:
            raise DomainError(f"k must be positive, got {self.k}")


def _pressure(P):
    """Validate and coerce a pressure argument (scalar or array, Pa)."""
    arr = np.asarray(P, dtype=np.float64)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("pressure must be finite and non-negative")
    return arr


def _shaped(out: np.ndarray, like) -> float | np.ndarray:
    return float(out) if np.ndim(like) == 0 else out


def static_capacitance(p: StaticParams, P) -> float | np.ndarray:
    """Parallel-plate capacitance eps0*eps_r*A(P)/d(P) in F.

    A(P) = A0 + alpha*P grows with load; d(P) = d - beta*P thins.  Raises
    DomainError once beta*P reaches d (dielectric fully compressed).
    """
    Pa = _pressure(P)
    g = p.geometry
    dP = g.d - p.beta * Pa
    if np.any(dP <= 0):
        raise DomainError("beta*P >= d: dielectric fully compressed")
    return _shaped(EPS0 * g.eps_r * (g.A0 + p.alpha * Pa) / dP, P)


def static_voltage(p: StaticParams, P) -> float | np.ndarray:
    """DC voltage Q*(d - beta*P)/(eps0*eps_r*(A0 + alpha*P)) in V.

    Identical to Q / static_capacitance(p, P); evaluated directly so the
    product V*C reproduces Q to machine precision.
    """
    Pa = _pressure(P)
    g = p.geometry
    dP = g.d - p.beta * Pa
    if np.any(dP <= 0):
        raise DomainError("beta*P >= d: dielectric fully compressed")
    return _shaped(p.Q * dP / (EPS0 * g.eps_r * (g.A0 + p.alpha * Pa)), P)


def static_sensitivity(p: StaticParams, P) -> float | np.ndarray:
    """Signed derivative dV/dP of the static voltage, V/Pa.

    (Q/(eps0*eps_r)) * (-beta*(A0+alpha*P) - alpha*(d-beta*P)) / (A0+alpha*P)^2.
    Negative for alpha, beta > 0 and Q > 0: the capacitance grows with load
    while Q stays fixed.
    """
    Pa = _pressure(P)
    g = p.geometry
    dP = g.d - p.beta * Pa
    if np.any(dP <= 0):
        raise DomainError("beta*P >= d: dielectric fully compressed")
    area = g.A0 + p.alpha * Pa
    num = -p.beta * area - p.alpha * dP
    return _shaped(p.Q / (EPS0 * g.eps_r) * num / (area * area), P)


def charge_density(p: DynamicParams, P) -> float | np.ndarray:
    """Surface charge density sigma0*(1 - exp(-m*P)) in C/m^2."""
    Pa = _pressure(P)
    return _shaped(p.sigma0 * -np.expm1(-p.m * Pa), P)


def effective_permittivity(g: Geometry, mode: PermittivityMode = PermittivityMode.CORRECTED) -> float:
    """Effective relative permittivity of the film-plus-gap stack.

    CORRECTED: 1/eps_eff = (d/(x+d))/eps_r + (x/(x+d))/1, the series
    combination of the film and the air gap.  FILM_WEIGHTED repeats the
    film fraction in the air term, 1/eps_eff = (d/(x+d))/eps_r + (d/(x+d)),
    and is kept only for side-by-side comparison.
    """
    total = g.x + g.d
    if mode is PermittivityMode.CORRECTED:
        inv = (g.d / total) / g.eps_r + (g.x / total)
    elif mode is PermittivityMode.FILM_WEIGHTED:
        inv = (g.d / total) / g.eps_r + (g.d / total)
    else:
        raise DomainError(f"unknown permittivity mode: {mode!r}")
    return 1.0 / inv


def cycle_charge(p: DynamicParams, A, P) -> float | np.ndarray:
    """Charge transferred per contact-separation cycle, sigma(P)*A, in C."""
    A_arr = np.asarray(A, dtype=np.float64)
    if np.any(A_arr <= 0):
        raise DomainError("contact area must be positive")
    out = charge_density(p, P) * A_arr
    return _shaped(np.asarray(out), P if np.ndim(P) else A)


def dynamic_peak_voltage(
    p: DynamicParams, P, mode: PermittivityMode = PermittivityMode.CORRECTED
) -> float | np.ndarray:
    """Open-circuit peak voltage per cycle, sigma(P)*(x+d)/(eps0*eps_eff), in V.

    Equals cycle_charge / C_min with C_min = eps0*eps_eff*A/(x+d); the
    contact area cancels, so the result is geometry-area independent.
    """
    g = p.geometry
    eps_eff = effective_permittivity(g, mode)
    out = charge_density(p, P) * (g.x + g.d) / (EPS0 * eps_eff)
    return _shaped(np.asarray(out), P)


def dynamic_voltage(p: DynamicParams, P) -> float | np.ndarray:
    """Empirical dynamic response V_max*(1 - exp(-k*P)) in V."""
    Pa = _pressure(P)
    return _shaped(p.V_max * -np.expm1(-p.k * Pa), P)


def dynamic_sensitivity(p: DynamicParams, P) -> float | np.ndarray:
    """Derivative V_max*k*exp(-k*P) of the dynamic response, V/Pa."""
    Pa = _pressure(P)
    return _shaped(p.V_max * p.k * np.exp(-p.k * Pa), P)
