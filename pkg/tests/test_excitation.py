import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isdtwin.errors import ConfigError
from isdtwin.excitation import ExcitationKind, ExcitationSpec, WeightStep, generate
from isdtwin.physics import G_STANDARD
from isdtwin.trace import Channel


def test_square_levels_and_duty():
    spec = ExcitationSpec(
        ExcitationKind.SQUARE, amplitude_pa=5e3, frequency_hz=2.0, duty=0.5,
        duration_s=2.0, sample_rate_hz=1000.0,
    )
    tr = generate(spec)
    assert tr.channel is Channel.PRESSURE_PA
    assert tr.n == 2000
    assert set(np.unique(tr.samples)) == {0.0, 5e3}
    # 50% duty: half the samples pressed
    assert np.count_nonzero(tr.samples) == 1000
    # each period starts unloaded so the first edge is a press
    assert tr.samples[0] == 0.0


def test_square_duty_fraction():
    spec = ExcitationSpec(
        ExcitationKind.SQUARE, amplitude_pa=1e3, frequency_hz=5.0, duty=0.2,
        duration_s=1.0, sample_rate_hz=2000.0,
    )
    tr = generate(spec)
    assert np.count_nonzero(tr.samples) == pytest.approx(0.2 * tr.n, abs=5)


def test_sine_is_nonnegative_with_expected_peaks():
    spec = ExcitationSpec(
        ExcitationKind.SINE, amplitude_pa=5e3, frequency_hz=3.0,
        duration_s=2.0, sample_rate_hz=1000.0,
    )
    tr = generate(spec)
    assert tr.n == 2000
    assert tr.samples.min() >= 0.0
    assert tr.samples.max() == pytest.approx(5e3, rel=1e-4)
    # raised-cosine profile peaks once per cycle
    x = tr.samples
    peaks = np.flatnonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:])) + 1
    assert len(peaks) == 6


def test_weight_steps_plateau_value():
    # 50 g over the default 1.6e-3 m^2 plate
    spec = ExcitationSpec(
        ExcitationKind.WEIGHT_STEPS,
        steps=(WeightStep(0.05, 0.5), WeightStep(0.1, 0.5)),
        duration_s=1.5, sample_rate_hz=1000.0, device_area_m2=1.6e-3,
    )
    tr = generate(spec)
    expect = 0.05 * G_STANDARD / 1.6e-3
    assert expect == pytest.approx(306.4578125, rel=1e-12)
    assert tr.value_at(0.25) == pytest.approx(expect, rel=1e-12)
    assert tr.value_at(0.75) == pytest.approx(2 * expect, rel=1e-12)
    # past the schedule the plate is unloaded
    assert tr.value_at(1.4) == 0.0


def test_tap_train_pulse_count_and_width():
    spec = ExcitationSpec(
        ExcitationKind.TAP_TRAIN, amplitude_pa=2e3, frequency_hz=4.0,
        duration_s=1.0, sample_rate_hz=4000.0, tap_width_s=0.03,
    )
    tr = generate(spec)
    pressed = tr.samples > 1.0
    # contiguous runs of contact, one per tap
    starts = np.flatnonzero(np.diff(pressed.astype(int)) == 1)
    assert len(starts) == 4
    runs = np.flatnonzero(np.diff(pressed.astype(int)) == -1) - starts
    assert np.all(np.abs(runs * tr.dt - 0.03) < 0.005)
    assert tr.samples.max() == pytest.approx(2e3, rel=1e-3)


def test_constant_hold():
    spec = ExcitationSpec(ExcitationKind.CONSTANT, amplitude_pa=750.0, duration_s=0.25,
                          sample_rate_hz=800.0)
    tr = generate(spec)
    assert np.all(tr.samples == 750.0)


def test_noise_is_seeded_and_clipped():
    spec = ExcitationSpec(
        ExcitationKind.SQUARE, amplitude_pa=100.0, frequency_hz=2.0, duty=0.5,
        duration_s=1.0, sample_rate_hz=1000.0, noise_rms_pa=50.0, seed=7,
    )
    a = generate(spec)
    b = generate(spec)
    assert np.array_equal(a.samples, b.samples)
    assert a.samples.min() >= 0.0  # pressure cannot be negative
    c = generate(ExcitationSpec(
        ExcitationKind.SQUARE, amplitude_pa=100.0, frequency_hz=2.0, duty=0.5,
        duration_s=1.0, sample_rate_hz=1000.0, noise_rms_pa=50.0, seed=8,
    ))
    assert not np.array_equal(a.samples, c.samples)


def test_validation_rejects_bad_specs():
    with pytest.raises(ConfigError):
        ExcitationSpec(ExcitationKind.SQUARE, amplitude_pa=1e3, frequency_hz=100.0,
                       duration_s=1.0, sample_rate_hz=1000.0)  # rate < 20 f
    with pytest.raises(ConfigError):
        ExcitationSpec(ExcitationKind.SQUARE, amplitude_pa=1e3, frequency_hz=2.0,
                       duty=1.5, duration_s=1.0)
    with pytest.raises(ConfigError):
        ExcitationSpec(ExcitationKind.WEIGHT_STEPS, steps=(), duration_s=1.0,
                       device_area_m2=1e-3)
    with pytest.raises(ConfigError):
        ExcitationSpec(ExcitationKind.WEIGHT_STEPS, steps=(WeightStep(0.1, 1.0),),
                       duration_s=1.0, device_area_m2=0.0)
    with pytest.raises(ConfigError):
        ExcitationSpec(ExcitationKind.TAP_TRAIN, amplitude_pa=1e3, frequency_hz=10.0,
                       duration_s=1.0, sample_rate_hz=1000.0, tap_width_s=0.2)


@settings(max_examples=40)
@given(
    st.sampled_from([ExcitationKind.SQUARE, ExcitationKind.SINE, ExcitationKind.TAP_TRAIN]),
    st.floats(min_value=1.0, max_value=1e4),
    st.floats(min_value=0.5, max_value=10.0),
)
def test_generated_pressure_never_negative_or_above_amplitude(kind, amp, freq):
    spec = ExcitationSpec(kind, amplitude_pa=amp, frequency_hz=freq,
                          duration_s=1.0, sample_rate_hz=max(1000.0, 25 * freq))
    tr = generate(spec)
    assert tr.samples.min() >= 0.0
    assert tr.samples.max() <= amp * (1 + 1e-12)
