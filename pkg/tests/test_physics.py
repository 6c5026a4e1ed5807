import numpy as np
import pytest
from hypothesis import given, strategies as st

from isdtwin.errors import DomainError
from isdtwin.physics import (
    EPS0,
    DynamicParams,
    Geometry,
    PermittivityMode,
    StaticParams,
    charge_density,
    cycle_charge,
    dynamic_peak_voltage,
    dynamic_sensitivity,
    dynamic_voltage,
    effective_permittivity,
    static_capacitance,
    static_sensitivity,
    static_voltage,
)

GEO = Geometry()


def test_static_capacitance_at_rest():
    # eps0 * eps_r * A0 / d with the default plate
    c = static_capacitance(StaticParams(), 0.0)
    assert c == pytest.approx(5.666680200192001e-11, rel=1e-15)


def test_static_voltage_at_rest():
    v = static_voltage(StaticParams(), 0.0)
    assert v == pytest.approx(17.647016677703427, rel=1e-15)


def test_fixed_charge_identity_scalar_and_array():
    p = StaticParams(Q=2.5e-9, alpha=1e-9, beta=5e-9)
    P = np.logspace(0, np.log10(5e4), 200)
    v = static_voltage(p, P)
    c = static_capacitance(p, P)
    assert np.max(np.abs(v * c - p.Q)) <= 1e-12 * abs(p.Q)
    assert static_voltage(p, 100.0) * static_capacitance(p, 100.0) == pytest.approx(
        p.Q, rel=1e-15
    )


def test_static_sensitivity_matches_finite_difference():
    p = StaticParams(Q=1e-9, alpha=2e-9, beta=4e-9)
    P = np.logspace(0, np.log10(5e4), 50)
    # step large enough that the difference is not lost to cancellation
    h = 1e-3 * np.maximum(P, 1.0)
    fd = (static_voltage(p, P + h) - static_voltage(p, P - h)) / (2 * h)
    s = static_sensitivity(p, P)
    assert np.all(np.abs(s - fd) <= 1e-6 * np.abs(fd))


def test_static_sensitivity_negative_when_compliant():
    # Pressing shrinks the gap and grows the area, so voltage falls.
    p = StaticParams(alpha=1e-9, beta=1e-9)
    assert static_sensitivity(p, 0.0) < 0
    assert static_sensitivity(p, 1e4) < 0


def test_crush_pressure_rejected():
    p = StaticParams(beta=1e-8)
    with pytest.raises(DomainError):
        static_voltage(p, p.p_crush)
    v = static_voltage(p, p.p_crush * 0.999)
    assert np.isfinite(v)


def test_charge_density_saturates():
    d = DynamicParams(sigma0=1e-5, m=5e-4)
    assert charge_density(d, 0.0) == 0.0
    sig = charge_density(d, np.array([1e3, 1e4, 1e6]))
    assert np.all(np.diff(sig) > 0)
    assert sig[-1] <= d.sigma0  # e^-500 underflows to 0, hitting the bound exactly
    assert charge_density(d, 1e9) == pytest.approx(d.sigma0, rel=1e-12)


def test_effective_permittivity_both_conventions():
    assert effective_permittivity(GEO, PermittivityMode.CORRECTED) == pytest.approx(
        1.2, rel=1e-12
    )
    assert effective_permittivity(GEO, PermittivityMode.FILM_WEIGHTED) == pytest.approx(
        2.0, rel=1e-12
    )


def test_dynamic_peak_voltage_value():
    # sigma (x + d) / (eps0 eps_eff) with full charge density
    d = DynamicParams(sigma0=1e-5, m=5e-4)
    v = dynamic_peak_voltage(d, 1e9)
    assert v == pytest.approx(1411.7613342162738, rel=1e-12)
    v_lit = dynamic_peak_voltage(d, 1e9, PermittivityMode.FILM_WEIGHTED)
    assert v_lit == pytest.approx(v * 1.2 / 2.0, rel=1e-12)


def test_dynamic_voltage_limits():
    d = DynamicParams()
    assert dynamic_voltage(d, 0.0) == 0.0
    assert dynamic_voltage(d, 1e12) == pytest.approx(d.V_max, rel=1e-12)
    assert dynamic_voltage(d, 1.5e3) == pytest.approx(86.32083197156999, rel=1e-12)


def test_dynamic_sensitivity_at_origin_and_fd():
    d = DynamicParams(V_max=163.6, k=5e-4)
    assert dynamic_sensitivity(d, 0.0) == pytest.approx(d.V_max * d.k, rel=1e-12)
    P = np.logspace(0, 4, 40)
    h = P * 1e-6
    fd = (dynamic_voltage(d, P + h) - dynamic_voltage(d, P - h)) / (2 * h)
    assert np.all(np.abs(dynamic_sensitivity(d, P) - fd) <= 1e-6 * np.abs(fd))


def test_low_pressure_linearization():
    d = DynamicParams(V_max=163.6, k=5e-4)
    P = np.array([1e-3, 1e-2, 1e-1, 1.0, 2.0]) * 1e-3 / d.k
    lin = d.V_max * d.k * P
    v = dynamic_voltage(d, P)
    mask = d.k * P <= 1e-3
    assert np.all(np.abs(v[mask] - lin[mask]) <= 1e-3 * np.abs(v[mask]))


def test_cycle_charge_scales_with_area():
    d = DynamicParams()
    q1 = cycle_charge(d, 1e-4, 2e3)
    q2 = cycle_charge(d, 2e-4, 2e3)
    assert q2 == pytest.approx(2 * q1, rel=1e-12)
    assert q1 == pytest.approx(charge_density(d, 2e3) * 1e-4, rel=1e-12)


def test_geometry_validation():
    with pytest.raises(DomainError):
        Geometry(A0=0.0)
    with pytest.raises(DomainError):
        Geometry(eps_r=0.5)
    with pytest.raises(DomainError):
        StaticParams(Q=0.0)


@given(
    st.floats(min_value=0.0, max_value=4.9e4),
    st.floats(min_value=1e-10, max_value=1e-8),
    st.floats(min_value=0.0, max_value=2e-9),
    st.floats(min_value=0.0, max_value=9e-9),
)
def test_fixed_charge_identity_property(P, Q, alpha, beta):
    p = StaticParams(Q=Q, alpha=alpha, beta=beta)
    v = static_voltage(p, P)
    c = static_capacitance(p, P)
    assert abs(v * c - Q) <= 1e-12 * Q


@given(st.floats(min_value=0.0, max_value=1e6), st.floats(min_value=0.0, max_value=1e6))
def test_dynamic_voltage_monotone_property(a, b):
    d = DynamicParams()
    lo, hi = min(a, b), max(a, b)
    assert dynamic_voltage(d, lo) <= dynamic_voltage(d, hi) <= d.V_max
