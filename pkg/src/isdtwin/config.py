"""Flat dotted-key configuration: defaults, parsing, validation, hashing.

The on-disk format is one `key = value` per line, `#` comments, with
dotted section prefixes (`harvest.storage_c_f = 2.2e-6`).  Every key has a
default below; unknown keys are rejected.  Values are coerced to the type
of the default: bool, int, float, comma-separated float list, or string.
A sha256 over the canonical sorted dump identifies a run's full input.
"""

from __future__ import annotations

import hashlib
import math
import os

from .charfit import piecewise_eval
from .conditioning import ConditioningNetwork, HarvestConfig
from .control import ChannelModel, ClassifyConfig, ControlMapping
from .errors import ConfigError
from .excitation import ExcitationKind, ExcitationSpec, WeightStep
from .gradient import GradientStack, Layer
from .physics import DynamicParams, Geometry, PermittivityMode, StaticParams
from .transducer import CEMode, CEState, ResponseDynamics, SensorParams

DEFAULTS: dict[str, object] = {
    "seed": 0,
    # Plate geometry (4 cm x 4 cm electrode, 0.5 mm film, 1 mm gap).
    "geometry.area_m2": 1.6e-3,
    "geometry.thickness_m": 5.0e-4,
    "geometry.gap_m": 1.0e-3,
    "geometry.eps_r": 2.0,
    # Static (fixed transferred charge) model.
    "static.charge_c": 1.0e-9,
    "static.alpha_m2_per_pa": 0.0,
    "static.beta_m_per_pa": 0.0,
    # Dynamic (contact-separation) model.
    "dynamic.sigma0_c_per_m2": 1.0e-5,
    "dynamic.m_per_pa": 5.0e-4,
    "dynamic.v_max_v": 163.6,
    "dynamic.k_per_pa": 5.0e-4,
    # Charge excitation.
    "ce.mode": "off",
    "ce.static_gain": 25.4,
    "ce.dynamic_gain": 15.2,
    # Response dynamics and output noise.
    "dynamics.tau_rise_s": 0.03778,
    "dynamics.tau_fall_s": 0.01957,
    "dynamics.noise_rms_v": 0.0,
    # Simulation knobs.
    "sim.permittivity": "corrected",
    "sim.pulse_width_s": 0.0,  # 0 means auto from edge spacing
    "sim.edge_floor_rel": 1e-3,
    # Empirical static transfer (piecewise curve) for the DC target.
    "transfer.enabled": False,
    "transfer.breaks_kpa": (11.0, 26.0),
    "transfer.slopes_v_per_kpa": (2.6, 0.7, 0.2),
    "transfer.v0_v": -0.152,
    # Gradient sponge stack.
    "gradient.enabled": False,
    "gradient.areas_cm2": (4.05, 8.1, 12.15, 16.2, 20.25),
    "gradient.engage_pressures_pa": (6.0, 904.5, 1803.0, 2701.5, 3600.0),
    "gradient.layer_thickness_m": 2.0e-3,
    "gradient.smoothing": 0.05,
    # Excitation generator.
    "excite.kind": "square",
    "excite.amplitude_pa": 5000.0,
    "excite.frequency_hz": 2.0,
    "excite.duty": 0.5,
    "excite.duration_s": 2.0,
    "excite.sample_rate_hz": 1000.0,
    "excite.tap_width_s": 0.03,
    "excite.noise_rms_pa": 0.0,
    "excite.masses_kg": (0.05, 0.1, 0.2),
    "excite.step_duration_s": 1.0,
    # Conditioning network.
    "conditioning.series_r_ohm": 50e6,
    "conditioning.parallel_c_f": 0.0,
    "conditioning.sensor_c_f": 100e-12,
    "conditioning.detect_floor_rel": 0.05,
    # Energy harvesting.
    "harvest.storage_c_f": 2.2e-6,
    "harvest.pulses_per_cycle": 2,
    "harvest.charge_per_pulse_c": 43.1e-9,
    "harvest.frequency_hz": 6.0,
    "harvest.duration_s": 60.0,
    "harvest.diode_drop_v": 0.0,
    "harvest.source_peak_v": math.inf,
    # Curve fitting.
    "fit.model": "piecewise",
    "fit.segments": 3,
    "fit.report_pressures_kpa": (0.5, 1.0, 2.0),
    # Event classification.
    "classify.dc_threshold_v": 0.5,
    "classify.hold_ms": 300.0,
    "classify.ac_threshold_v": 0.5,
    "classify.hysteresis": 0.5,
    "classify.pair_width_factor": 1.5,
    # Control mapping and actuation.
    "control.v_zero_v": -0.152,
    "control.v_full_v": 4.014,
    "control.gesture_window_ms": 800.0,
    "control.rate_hz": 50.0,
    "control.tau_act_s": 0.05,
    "control.sim_rate_hz": 200.0,
    "control.settle_s": 0.5,
    # Simulated wireless link.
    "channel.latency_s": 0.0,
    "channel.drop_probability": 0.0,
}


def _coerce(key: str, raw: str):
    if key not in DEFAULTS:
        raise ConfigError(f"unknown config key: {key}")
    default = DEFAULTS[key]
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            if not raw:
                return ()
            return tuple(float(x) for x in raw.split(","))
        return raw
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {raw!r}") from e


def _canon(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Config:
    """Immutable key-value view with a reproducible content hash."""

    def __init__(self, values: dict[str, object]):
        self._values = dict(values)

    def __getitem__(self, key: str):
        if key not in self._values:
            raise ConfigError(f"unknown config key: {key}")
        return self._values[key]

    def keys(self):
        return self._values.keys()

    def canonical_text(self) -> str:
        return "".join(f"{k} = {_canon(self._values[k])}\n" for k in sorted(self._values))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse `key = value` lines into coerced values; unknown keys rejected."""
    out: dict[str, object] = {}
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{ln}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        try:
            out[key.strip()] = _coerce(key.strip(), raw)
        except ConfigError as e:
            raise ConfigError(f"{source}:{ln}: {e}") from None
    return out


def load_config(
    path: str | None = None,
    overrides: tuple[str, ...] = (),
    env: dict | None = None,
) -> Config:
    """Defaults, then file, then --set overrides, then ISD_SEED; validated."""
    values = dict(DEFAULTS)
    if path is not None:
        with open(path, encoding="utf-8") as f:
            values.update(parse_config_text(f.read(), source=path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, _, raw = item.partition("=")
        values[key.strip()] = _coerce(key.strip(), raw)
    env = os.environ if env is None else env
    if env.get("ISD_SEED"):
        try:
            values["seed"] = int(env["ISD_SEED"])
        except ValueError as e:
            raise ConfigError(f"ISD_SEED must be an integer, got {env['ISD_SEED']!r}") from e
    cfg = Config(values)
    validate(cfg)
    return cfg


def validate(cfg: Config) -> None:
    """Construct every section's domain object, surfacing bad values early."""
    build_sensor(cfg)
    build_dynamics(cfg)
    build_excitation(cfg)
    build_network(cfg)
    build_harvest(cfg)
    build_classify(cfg)
    build_mapping(cfg)
    build_channel(cfg)
    if not isinstance(cfg["fit.segments"], int) or not 1 <= cfg["fit.segments"] <= 4:
        raise ConfigError("fit.segments must be an integer in [1, 4]")
    if cfg["fit.model"] not in ("piecewise", "exponential"):
        raise ConfigError("fit.model must be 'piecewise' or 'exponential'")
    if cfg["control.tau_act_s"] <= 0 or cfg["control.sim_rate_hz"] <= 0:
        raise ConfigError("control.tau_act_s and control.sim_rate_hz must be positive")
    if cfg["control.settle_s"] < 0:
        raise ConfigError("control.settle_s must be non-negative")
    if cfg["sim.pulse_width_s"] < 0:
        raise ConfigError("sim.pulse_width_s must be non-negative")
    if not 0 < cfg["sim.edge_floor_rel"] < 1:
        raise ConfigError("sim.edge_floor_rel must be in (0, 1)")


def build_geometry(cfg: Config) -> Geometry:
    return Geometry(
        A0=cfg["geometry.area_m2"],
        d=cfg["geometry.thickness_m"],
        x=cfg["geometry.gap_m"],
        eps_r=cfg["geometry.eps_r"],
    )


def build_static(cfg: Config) -> StaticParams:
    return StaticParams(
        Q=cfg["static.charge_c"],
        alpha=cfg["static.alpha_m2_per_pa"],
        beta=cfg["static.beta_m_per_pa"],
        geometry=build_geometry(cfg),
    )


def build_dynamic(cfg: Config) -> DynamicParams:
    return DynamicParams(
        sigma0=cfg["dynamic.sigma0_c_per_m2"],
        m=cfg["dynamic.m_per_pa"],
        V_max=cfg["dynamic.v_max_v"],
        k=cfg["dynamic.k_per_pa"],
        geometry=build_geometry(cfg),
    )


def build_ce(cfg: Config) -> CEState:
    try:
        mode = CEMode(cfg["ce.mode"])
    except ValueError as e:
        raise ConfigError(f"ce.mode must be off, pce or rce, got {cfg['ce.mode']!r}") from e
    return CEState(mode, cfg["ce.static_gain"], cfg["ce.dynamic_gain"])


def build_permittivity_mode(cfg: Config) -> PermittivityMode:
    try:
        return PermittivityMode(cfg["sim.permittivity"])
    except ValueError as e:
        raise ConfigError(
            f"sim.permittivity must be corrected or film_weighted, got {cfg['sim.permittivity']!r}"
        ) from e


def build_stack(cfg: Config) -> GradientStack | None:
    if not cfg["gradient.enabled"]:
        return None
    areas = cfg["gradient.areas_cm2"]
    pressures = cfg["gradient.engage_pressures_pa"]
    if len(areas) != len(pressures):
        raise ConfigError("gradient.areas_cm2 and gradient.engage_pressures_pa lengths differ")
    layers = tuple(Layer(a * 1e-4, p) for a, p in zip(areas, pressures))
    return GradientStack(layers, cfg["gradient.layer_thickness_m"], cfg["gradient.smoothing"])


def build_transfer(cfg: Config):
    if not cfg["transfer.enabled"]:
        return None
    breaks_pa = tuple(b * 1e3 for b in cfg["transfer.breaks_kpa"])
    slopes_v_per_pa = tuple(s / 1e3 for s in cfg["transfer.slopes_v_per_kpa"])
    v0 = cfg["transfer.v0_v"]
    if len(slopes_v_per_pa) != len(breaks_pa) + 1:
        raise ConfigError("transfer needs one more slope than breakpoints")

    def transfer(P):
        return piecewise_eval(P, breaks_pa, slopes_v_per_pa, v0)

    return transfer


def build_sensor(cfg: Config) -> SensorParams:
    return SensorParams(
        static=build_static(cfg),
        dynamic=build_dynamic(cfg),
        stack=build_stack(cfg),
        ce=build_ce(cfg),
        perm_mode=build_permittivity_mode(cfg),
        static_transfer=build_transfer(cfg),
    )


def build_dynamics(cfg: Config) -> ResponseDynamics:
    return ResponseDynamics(
        tau_rise_s=cfg["dynamics.tau_rise_s"],
        tau_fall_s=cfg["dynamics.tau_fall_s"],
        noise_rms_v=cfg["dynamics.noise_rms_v"],
        seed=cfg["seed"],
    )


def build_excitation(cfg: Config) -> ExcitationSpec:
    try:
        kind = ExcitationKind(cfg["excite.kind"])
    except ValueError as e:
        valid = ", ".join(k.value for k in ExcitationKind)
        raise ConfigError(f"excite.kind must be one of {valid}, got {cfg['excite.kind']!r}") from e
    steps = tuple(
        WeightStep(m, cfg["excite.step_duration_s"]) for m in cfg["excite.masses_kg"]
    )
    return ExcitationSpec(
        kind=kind,
        amplitude_pa=cfg["excite.amplitude_pa"],
        frequency_hz=cfg["excite.frequency_hz"],
        duty=cfg["excite.duty"],
        duration_s=cfg["excite.duration_s"],
        sample_rate_hz=cfg["excite.sample_rate_hz"],
        steps=steps,
        device_area_m2=cfg["geometry.area_m2"],
        tap_width_s=cfg["excite.tap_width_s"],
        noise_rms_pa=cfg["excite.noise_rms_pa"],
        seed=cfg["seed"],
    )


def build_network(cfg: Config) -> ConditioningNetwork:
    return ConditioningNetwork(
        series_R_ohm=cfg["conditioning.series_r_ohm"],
        parallel_C_f=cfg["conditioning.parallel_c_f"],
        sensor_C_f=cfg["conditioning.sensor_c_f"],
    )


def build_harvest(cfg: Config) -> HarvestConfig:
    return HarvestConfig(
        storage_C_f=cfg["harvest.storage_c_f"],
        pulses_per_cycle=cfg["harvest.pulses_per_cycle"],
        charge_per_pulse_c=cfg["harvest.charge_per_pulse_c"],
        frequency_hz=cfg["harvest.frequency_hz"],
        duration_s=cfg["harvest.duration_s"],
        diode_drop_v=cfg["harvest.diode_drop_v"],
        source_peak_v=cfg["harvest.source_peak_v"],
    )


def build_classify(cfg: Config) -> ClassifyConfig:
    return ClassifyConfig(
        dc_threshold_v=cfg["classify.dc_threshold_v"],
        hold_ms=cfg["classify.hold_ms"],
        ac_threshold_v=cfg["classify.ac_threshold_v"],
        hysteresis=cfg["classify.hysteresis"],
        pair_width_factor=cfg["classify.pair_width_factor"],
    )


def build_mapping(cfg: Config) -> ControlMapping:
    return ControlMapping(
        v_zero_v=cfg["control.v_zero_v"],
        v_full_v=cfg["control.v_full_v"],
        gesture_window_ms=cfg["control.gesture_window_ms"],
        control_rate_hz=cfg["control.rate_hz"],
    )


def build_channel(cfg: Config) -> ChannelModel:
    return ChannelModel(
        latency_s=cfg["channel.latency_s"],
        drop_probability=cfg["channel.drop_probability"],
        seed=cfg["seed"],
    )
