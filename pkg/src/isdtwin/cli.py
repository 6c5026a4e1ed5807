"""Command-line pipelines: gen, sim, condition, harvest, fit, classify, control, report.

Every subcommand takes `--config <path>` plus repeatable `--set key=value`
overrides; randomness is seeded from the config (env ISD_SEED wins).  Exit
status: 0 success, 1 validation error, 2 I/O error.  Messages go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__, config as cfgmod, traceio
from .charfit import (
    ExpFit,
    PiecewiseFit,
    detection_limit,
    extract_response_times,
    fit_exponential,
    fit_piecewise,
    sensitivity_report,
)
from .conditioning import harvest as run_harvest, shape_pulse
from .control import actuate, classify, map_control, transmit
from .errors import ConfigError, IsdError, TraceFormatError
from .excitation import ExcitationKind, ExcitationSpec, generate
from .trace import Channel
from .transducer import simulate


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _expect_channel(trace, channel: Channel, what: str):
    if trace.channel is not channel:
        raise ConfigError(
            f"{what} expects a {channel.value} trace, got {trace.channel.value}"
        )
    return trace


def _cmd_gen(cfg, args) -> int:
    trace = generate(cfgmod.build_excitation(cfg))
    traceio.write_trace(args.out, trace)
    return 0


def _cmd_sim(cfg, args) -> int:
    pressure = _expect_channel(traceio.read_trace(args.input), Channel.PRESSURE_PA, "sim")
    width = cfg["sim.pulse_width_s"] or None
    result = simulate(
        pressure,
        cfgmod.build_sensor(cfg),
        dyn=cfgmod.build_dynamics(cfg),
        pulse_width_s=width,
        edge_floor_rel=cfg["sim.edge_floor_rel"],
    )
    traceio.write_trace(args.dc, result.dc)
    traceio.write_trace(args.ac, result.ac)
    return 0


def _cmd_condition(cfg, args) -> int:
    ac = _expect_channel(traceio.read_trace(args.input), Channel.VOLTAGE_AC, "condition")
    shaped = shape_pulse(
        ac, cfgmod.build_network(cfg), detect_floor_rel=cfg["conditioning.detect_floor_rel"]
    )
    traceio.write_trace(args.out, shaped)
    return 0


def _cmd_harvest(cfg, args) -> int:
    traceio.write_trace(args.out, run_harvest(cfgmod.build_harvest(cfg)))
    return 0


def _fit_payload(cfg, pv_path: str) -> dict:
    model = cfg["fit.model"]
    if model == "piecewise":
        data = traceio.read_pv(pv_path, mode="static")
        fit = fit_piecewise(data, cfg["fit.segments"])
        rows = sensitivity_report(fit)
        return {
            "model": "piecewise",
            "breakpoints_kpa": [b / 1e3 for b in fit.breakpoints_pa],
            "slopes_v_per_kpa": [s * 1e3 for s in fit.slopes_v_per_pa],
            "intercepts_v": list(fit.intercepts_v),
            "rmse_v": fit.rmse_v,
            "pressure_range_kpa": [fit.p_min_pa / 1e3, fit.p_max_pa / 1e3],
            "sensitivity": [
                {
                    "p_lo_kpa": r.p_lo_pa / 1e3,
                    "p_hi_kpa": r.p_hi_pa / 1e3,
                    "s_v_per_kpa": r.sensitivity_v_per_pa * 1e3,
                }
                for r in rows
            ],
        }
    data = traceio.read_pv(pv_path, mode="dynamic")
    fit = fit_exponential(data)
    at = tuple(p * 1e3 for p in cfg["fit.report_pressures_kpa"])
    rows = sensitivity_report(fit, at_pressures_pa=at)
    return {
        "model": "exponential",
        "v_max_v": fit.V_max_v,
        "k_per_kpa": fit.k_per_pa * 1e3,
        "rmse_v": fit.rmse_v,
        "sensitivity": [
            {"p_kpa": r.p_lo_pa / 1e3, "s_v_per_kpa": r.sensitivity_v_per_pa * 1e3}
            for r in rows
        ],
    }


def _cmd_fit(cfg, args) -> int:
    traceio.write_json(args.out, _fit_payload(cfg, args.input))
    return 0


def _cmd_classify(cfg, args) -> int:
    dc = _expect_channel(traceio.read_trace(args.dc), Channel.VOLTAGE_DC, "classify --dc")
    ac = _expect_channel(traceio.read_trace(args.ac), Channel.VOLTAGE_AC, "classify --ac")
    traceio.write_events(args.out, classify(dc, ac, cfgmod.build_classify(cfg)))
    return 0


def _cmd_control(cfg, args) -> int:
    if args.events is not None:
        events = traceio.read_events(args.events)
        dc = None
    elif args.dc is not None and args.ac is not None:
        dc = _expect_channel(traceio.read_trace(args.dc), Channel.VOLTAGE_DC, "control --dc")
        ac = _expect_channel(traceio.read_trace(args.ac), Channel.VOLTAGE_AC, "control --ac")
        events = classify(dc, ac, cfgmod.build_classify(cfg))
    else:
        raise ConfigError("control needs either --events or both --dc and --ac")
    cmds = map_control(events, dc, cfgmod.build_mapping(cfg))
    delivered = transmit(cmds, cfgmod.build_channel(cfg))
    traceio.write_commands(args.out, delivered)
    if args.trajectory is not None:
        traj = actuate(
            delivered,
            tau_act_s=cfg["control.tau_act_s"],
            sim_rate_hz=cfg["control.sim_rate_hz"],
            settle_s=cfg["control.settle_s"],
        )
        traceio.write_trajectory(args.trajectory, traj)
    return 0


def _step_response_times(cfg) -> dict:
    """Response times off a clean internal step; noise would only blur them."""
    spec = ExcitationSpec(
        ExcitationKind.SQUARE,
        amplitude_pa=max(cfg["excite.amplitude_pa"], 1.0),
        frequency_hz=1.0,
        duty=0.5,
        duration_s=2.0,
        sample_rate_hz=2000.0,
    )
    dyn = replace(cfgmod.build_dynamics(cfg), noise_rms_v=0.0)
    result = simulate(generate(spec), cfgmod.build_sensor(cfg), dyn=dyn)
    times = extract_response_times(result.dc)
    return {"rise_ms": times.rise_ms, "fall_ms": times.fall_ms}


def _cmd_report(cfg, args) -> int:
    harvest_trace = run_harvest(cfgmod.build_harvest(cfg))
    report = {
        "tool": "isd",
        "version": __version__,
        "config_hash": cfg.hash,
        "seed": cfg["seed"],
        "response_times": _step_response_times(cfg),
        "detection_limit_pa": None,
        "harvest": {
            "final_v": float(harvest_trace.samples[-1]),
            "mean_slope_v_per_s": float(
                (harvest_trace.samples[-1] - harvest_trace.samples[0])
                / max(harvest_trace.times[-1] - harvest_trace.times[0], harvest_trace.dt)
            ),
        },
        "artifacts": {},
    }
    dyn = cfgmod.build_dynamics(cfg)
    if dyn.noise_rms_v > 0:
        report["detection_limit_pa"] = detection_limit(cfgmod.build_dynamic(cfg), dyn)
    if args.pv is not None:
        report["fit"] = _fit_payload(cfg, args.pv)
        report["artifacts"]["pv"] = args.pv
    traceio.write_json(args.out, report)
    return 0


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="config file (flat key = value)")
    common.add_argument(
        "--set",
        dest="sets",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )

    parser = _Parser(prog="isd", description="iSD sensor digital twin pipelines")
    parser.add_argument("--version", action="version", version=f"isd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a pressure excitation trace")
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("sim", parents=[common], help="simulate DC and AC sensor outputs")
    p.add_argument("-i", "--input", required=True, metavar="CSV", help="pressure trace")
    p.add_argument("--dc", required=True, metavar="CSV")
    p.add_argument("--ac", required=True, metavar="CSV")
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("condition", parents=[common], help="shape AC pulses through the RC network")
    p.add_argument("-i", "--input", required=True, metavar="CSV", help="AC voltage trace")
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    p.set_defaults(func=_cmd_condition)

    p = sub.add_parser("harvest", parents=[common], help="charge a storage capacitor")
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    p.set_defaults(func=_cmd_harvest)

    p = sub.add_parser("fit", parents=[common], help="fit a pressure-voltage curve")
    p.add_argument("-i", "--input", required=True, metavar="CSV", help="pressure_kpa,voltage_v")
    p.add_argument("-o", "--out", required=True, metavar="JSON")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("classify", parents=[common], help="detect plateau and spike events")
    p.add_argument("--dc", required=True, metavar="CSV")
    p.add_argument("--ac", required=True, metavar="CSV")
    p.add_argument("-o", "--out", required=True, metavar="JSON")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("control", parents=[common], help="map events to hand commands")
    p.add_argument("--events", metavar="JSON")
    p.add_argument("--dc", metavar="CSV")
    p.add_argument("--ac", metavar="CSV")
    p.add_argument("-o", "--out", required=True, metavar="JSONL", help="command log")
    p.add_argument("--trajectory", metavar="CSV", help="also simulate finger angles")
    p.set_defaults(func=_cmd_control)

    p = sub.add_parser("report", parents=[common], help="aggregate metrics into one JSON")
    p.add_argument("-o", "--out", required=True, metavar="JSON")
    p.add_argument("--pv", metavar="CSV", help="optional PV curve to fit and embed")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        cfg = cfgmod.load_config(args.config, tuple(args.sets))
        return args.func(cfg, args)
    except (TraceFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except IsdError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
