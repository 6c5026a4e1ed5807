"""RC pulse conditioning and rectifier-plus-capacitor energy harvesting.

The conditioning network treats the sensor as a charge source with a small
internal capacitance Cs.  A pulse peaking at V carries charge Q0 = Cs*V;
dumped onto the node it appears as amplitude Q0/(Cs + Cp) and bleeds
through the series resistor with time constant R*(Cs + Cp).  Harvesting is
an ideal charge pump: each rectified pulse moves a fixed charge onto the
storage capacitor while the source has headroom over the stored voltage
plus two diode drops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, TraceFormatError
from .peaks import find_excursions
from .trace import Channel, Trace


@dataclass(frozen=True)
class ConditioningNetwork:
    """Series R and parallel C around the sensor's internal capacitance."""

    series_R_ohm: float = 50e6
    parallel_C_f: float = 0.0
    sensor_C_f: float = 100e-12

    def __post_init__(self):
        if self.series_R_ohm <= 0:
            raise ConfigError("series_R_ohm must be positive")
        if self.parallel_C_f < 0:
            raise ConfigError("parallel_C_f must be non-negative")
        if self.sensor_C_f <= 0:
            raise ConfigError("sensor_C_f must be positive")

    @property
    def total_C_f(self) -> float:
        return self.sensor_C_f + self.parallel_C_f

    @property
    def tau_s(self) -> float:
        return self.series_R_ohm * self.total_C_f


def shape_pulse(ac: Trace, net: ConditioningNetwork, *, detect_floor_rel: float = 0.05) -> Trace:
    """Shape an AC pulse train through the conditioning network.

    Input pulses are located by a hysteresis scan at detect_floor_rel of
    the trace's absolute maximum; each injects its charge Cs*V_peak at its
    peak sample, and the node decays exponentially in between.  Output
    amplitude per pulse is Cs*V_peak/(Cs+Cp); half-max width is tau*ln 2.
    """
    if ac.channel is not Channel.VOLTAGE_AC:
        raise TraceFormatError(f"expected an AC voltage trace, got {ac.channel.value}")
    v = ac.samples
    out = np.zeros_like(v)
    vmax = float(np.max(np.abs(v)))
    if vmax > 0:
        inj = np.zeros_like(v)
        scale = net.sensor_C_f / net.total_C_f
        for exc in find_excursions(v, detect_floor_rel * vmax):
            inj[exc.peak_index] += scale * exc.peak_value
        a = math.exp(-ac.dt / net.tau_s)
        out = _kernels.decay_accumulate(inj, a)
    return Trace(ac.t0, ac.dt, out, Channel.VOLTAGE_AC)


@dataclass(frozen=True)
class HarvestConfig:
    """Ideal charge-pump harvesting into a storage capacitor.

    source_peak_v bounds delivery: a pulse is dropped once the stored
    voltage plus two diode drops reaches it.  The default (inf) means
    unlimited headroom, matching the idealized charging curves.
    """

    storage_C_f: float = 2.2e-6
    pulses_per_cycle: int = 2
    charge_per_pulse_c: float = 43.1e-9
    frequency_hz: float = 6.0
    duration_s: float = 60.0
    diode_drop_v: float = 0.0
    source_peak_v: float = math.inf

    def __post_init__(self):
        if self.storage_C_f <= 0:
            raise ConfigError("storage_C_f must be positive")
        if self.pulses_per_cycle not in (1, 2):
            raise ConfigError("pulses_per_cycle must be 1 or 2")
        if self.charge_per_pulse_c < 0:
            raise ConfigError("charge_per_pulse_c must be non-negative")
        if self.frequency_hz <= 0:
            raise ConfigError("frequency_hz must be positive")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.diode_drop_v < 0:
            raise ConfigError("diode_drop_v must be non-negative")


def harvest(cfg: HarvestConfig) -> Trace:
    """Storage-capacitor voltage over time; one sample per pulse slot.

    Sample i holds the voltage after i pulse slots, so V = N*Q/C while the
    headroom gate stays open.  Larger storage capacitance charges slower at
    every time point; the voltage never decreases.
    """
    pulse_rate = cfg.pulses_per_cycle * cfg.frequency_hz
    n_pulses = int(math.floor(cfg.duration_s * pulse_rate))
    counts = np.arange(n_pulses + 1, dtype=np.float64)
    if cfg.charge_per_pulse_c > 0 and math.isfinite(cfg.source_peak_v):
        # Pulse j (0-based) delivers only while source_peak exceeds the
        # stored voltage plus both diode drops: j*Q/C < source_peak - 2*drop.
        headroom = cfg.source_peak_v - 2.0 * cfg.diode_drop_v
        if headroom <= 0:
            cap = 0
        else:
            cap = math.ceil(headroom * cfg.storage_C_f / cfg.charge_per_pulse_c)
        counts = np.minimum(counts, float(cap))
    volts = counts * cfg.charge_per_pulse_c / cfg.storage_C_f
    return Trace(0.0, 1.0 / pulse_rate, volts, Channel.VOLTAGE_DC)
