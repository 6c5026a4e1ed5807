"""Digital twin and analysis toolkit for a self-powered static/dynamic
triboelectric pressure sensor: closed-form device physics, a gradient
porous stack, excitation synthesis, output simulation with charge
excitation, signal conditioning and energy harvesting, curve fitting, and
an event-to-prosthetic-hand control pipeline."""

from .charfit import (
    ExpFit,
    PiecewiseFit,
    PVSamples,
    ResponseTimes,
    SensitivityRow,
    detection_limit,
    extract_response_times,
    fit_exponential,
    fit_piecewise,
    piecewise_eval,
    sensitivity_report,
)
from .conditioning import ConditioningNetwork, HarvestConfig, harvest, shape_pulse
from .control import (
    GESTURE_POSES,
    ChannelModel,
    ClassifyConfig,
    CommandKind,
    ControlCommand,
    ControlMapping,
    Event,
    EventKind,
    HandState,
    HandTrajectory,
    actuate,
    classify,
    gesture_pose,
    map_control,
    transmit,
)
from .errors import (
    ConfigError,
    DetectionError,
    DomainError,
    FitError,
    IsdError,
    TraceFormatError,
)
from .excitation import ExcitationKind, ExcitationSpec, WeightStep, generate
from .gradient import GradientStack, Layer, default_stack, engaged_area, gradient_response
from .peaks import Excursion, find_excursions
from .physics import (
    EPS0,
    G_STANDARD,
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
from .trace import Channel, Trace
from .traceio import (
    FINGER_COLUMNS,
    event_to_dict,
    read_commands,
    read_events,
    read_json,
    read_pv,
    read_trace,
    write_commands,
    write_events,
    write_json,
    write_pv,
    write_trace,
    write_trajectory,
)
from .transducer import (
    CEMode,
    CEState,
    ResponseDynamics,
    SensorParams,
    SimResult,
    apply_charge_excitation,
    detect_edges,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "EPS0",
    "FINGER_COLUMNS",
    "G_STANDARD",
    "GESTURE_POSES",
    "CEMode",
    "CEState",
    "Channel",
    "ChannelModel",
    "ClassifyConfig",
    "CommandKind",
    "ConditioningNetwork",
    "ConfigError",
    "ControlCommand",
    "ControlMapping",
    "DetectionError",
    "DomainError",
    "DynamicParams",
    "Event",
    "EventKind",
    "ExcitationKind",
    "ExcitationSpec",
    "Excursion",
    "ExpFit",
    "FitError",
    "Geometry",
    "GradientStack",
    "HandState",
    "HandTrajectory",
    "HarvestConfig",
    "IsdError",
    "Layer",
    "PVSamples",
    "PermittivityMode",
    "PiecewiseFit",
    "ResponseDynamics",
    "ResponseTimes",
    "SensitivityRow",
    "SensorParams",
    "SimResult",
    "StaticParams",
    "Trace",
    "TraceFormatError",
    "WeightStep",
    "actuate",
    "apply_charge_excitation",
    "charge_density",
    "classify",
    "cycle_charge",
    "default_stack",
    "detect_edges",
    "detection_limit",
    "dynamic_peak_voltage",
    "dynamic_sensitivity",
    "dynamic_voltage",
    "effective_permittivity",
    "engaged_area",
    "event_to_dict",
    "extract_response_times",
    "find_excursions",
    "fit_exponential",
    "fit_piecewise",
    "generate",
    "gesture_pose",
    "gradient_response",
    "harvest",
    "map_control",
    "piecewise_eval",
    "read_commands",
    "read_events",
    "read_json",
    "read_pv",
    "read_trace",
    "sensitivity_report",
    "shape_pulse",
    "simulate",
    "static_capacitance",
    "static_sensitivity",
    "static_voltage",
    "transmit",
    "write_commands",
    "write_events",
    "write_json",
    "write_pv",
    "write_trace",
    "write_trajectory",
    "__version__",
]
