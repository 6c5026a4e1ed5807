"""CSV/JSON serialization for traces, PV samples, events and command logs.

Floats are written with repr, which round-trips exactly, so a write/read
cycle loses nothing.  All writes go through a temp file in the target
directory followed by os.replace, so readers never see a partial file.
Column and key names carry the unit (`time_s`, `pressure_kpa`).
"""

from __future__ import annotations

import contextlib
import json
import os
import tempfile

import numpy as np

from .charfit import PVSamples
from .control import CommandKind, ControlCommand, Event, EventKind, HandTrajectory
from .errors import TraceFormatError
from .trace import Channel, Trace

FINGER_COLUMNS = ("thumb_deg", "index_deg", "middle_deg", "ring_deg", "little_deg")

# Relative tolerance for the uniform-sampling check on read.
_DT_RTOL = 1e-9


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".isd-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _rows_to_text(header: str, columns) -> str:
    lists = [np.asarray(c, dtype=float).tolist() for c in columns]
    lines = [header]
    lines.extend(",".join(repr(v) for v in row) for row in zip(*lists))
    lines.append("")
    return "\n".join(lines)


def write_trace(path: str, trace: Trace) -> None:
    header = f"time_s,{trace.channel.value}"
    _atomic_write_text(path, _rows_to_text(header, [trace.times, trace.samples]))


def _read_rows(path: str, n_columns: int) -> tuple[str, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as f:
        header = f.readline().strip()
        if not header:
            raise TraceFormatError(f"{path}:1: empty file")
        rows = []
        for ln, line in enumerate(f, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n_columns:
                raise TraceFormatError(
                    f"{path}:{ln}: expected {n_columns} columns, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise TraceFormatError(f"{path}:{ln}: not a number: {line!r}") from None
    if len(rows) < 2:
        raise TraceFormatError(f"{path}: need at least 2 data rows, got {len(rows)}")
    data = np.asarray(rows, dtype=float)
    if not np.isfinite(data).all():
        bad = int(np.argwhere(~np.isfinite(data))[0, 0])
        raise TraceFormatError(f"{path}:{bad + 2}: non-finite value")
    return header, data


def read_trace(path: str) -> Trace:
    header, data = _read_rows(path, 2)
    prefix, _, channel_name = header.partition(",")
    if prefix != "time_s":
        raise TraceFormatError(f"{path}:1: first column must be time_s, got {prefix!r}")
    try:
        channel = Channel(channel_name)
    except ValueError:
        valid = ", ".join(c.value for c in Channel)
        raise TraceFormatError(
            f"{path}:1: unknown channel {channel_name!r}, expected one of {valid}"
        ) from None
    times = data[:, 0]
    gaps = np.diff(times)
    dt = float(np.median(gaps))
    if dt <= 0:
        raise TraceFormatError(f"{path}: time column must be strictly increasing")
    if np.abs(gaps - dt).max() > _DT_RTOL * dt:
        raise TraceFormatError(f"{path}: non-uniform sampling (dt varies beyond 1e-9 relative)")
    return Trace(float(times[0]), dt, data[:, 1], channel)


def write_pv(path: str, data: PVSamples) -> None:
    text = _rows_to_text(
        "pressure_kpa,voltage_v", [data.pressures_pa / 1e3, data.voltages_v]
    )
    _atomic_write_text(path, text)


def read_pv(path: str, mode: str = "static") -> PVSamples:
    header, data = _read_rows(path, 2)
    if header != "pressure_kpa,voltage_v":
        raise TraceFormatError(
            f"{path}:1: expected header 'pressure_kpa,voltage_v', got {header!r}"
        )
    return PVSamples(data[:, 0] * 1e3, data[:, 1], mode=mode)


def write_json(path: str, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def read_json(path: str):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def event_to_dict(e: Event) -> dict:
    return {
        "kind": e.kind.value,
        "t_start_s": e.t_start_s,
        "t_end_s": e.t_end_s,
        "amplitude_v": e.amplitude_v,
        "polarity": e.polarity,
        "lobe_polarities": list(e.lobe_polarities),
    }


def write_events(path: str, events: list[Event]) -> None:
    write_json(path, [event_to_dict(e) for e in events])


def read_events(path: str) -> list[Event]:
    raw = read_json(path)
    if not isinstance(raw, list):
        raise TraceFormatError(f"{path}: expected a JSON list of events")
    events = []
    for i, item in enumerate(raw):
        try:
            events.append(
                Event(
                    kind=EventKind(item["kind"]),
                    t_start_s=float(item["t_start_s"]),
                    t_end_s=float(item["t_end_s"]),
                    amplitude_v=float(item["amplitude_v"]),
                    polarity=int(item.get("polarity", 0)),
                    lobe_polarities=tuple(item.get("lobe_polarities", ())),
                )
            )
        except (KeyError, ValueError, TypeError) as err:
            raise TraceFormatError(f"{path}: event {i}: {err}") from None
    return events


def write_commands(path: str, cmds: list[ControlCommand]) -> None:
    lines = [
        json.dumps({"t": c.t_s, "kind": c.kind.value, "value": c.value}) for c in cmds
    ]
    _atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_commands(path: str) -> list[ControlCommand]:
    cmds = []
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                kind = CommandKind(row["kind"])
                if kind is CommandKind.BEND:
                    cmds.append(ControlCommand(float(row["t"]), kind, level=float(row["value"])))
                else:
                    cmds.append(
                        ControlCommand(float(row["t"]), kind, gesture=int(row["value"]))
                    )
            except (KeyError, ValueError, TypeError) as err:
                raise TraceFormatError(f"{path}:{ln}: {err}") from None
    return cmds


def write_trajectory(path: str, traj: HandTrajectory) -> None:
    times = traj.t0 + traj.dt * np.arange(traj.angles_deg.shape[0])
    columns = [times] + [traj.angles_deg[:, i] for i in range(5)]
    _atomic_write_text(path, _rows_to_text("time_s," + ",".join(FINGER_COLUMNS), columns))
