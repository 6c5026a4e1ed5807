"""Dual-mode event classification and robotic-hand control mapping.

Sustained DC excursions become StaticPlateau events, AC threshold
excursions become DynamicSpike events (bipolar lobe pairs collapsed to one
tap each).  Plateaus drive proportional Bend commands at a fixed control
rate; spike counts inside a gesture window drive discrete Trigger
commands.  A seeded lossy channel and a first-order actuated hand close
the loop.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import ConfigError, DomainError
from .peaks import find_excursions
from .trace import Trace


class EventKind(enum.Enum):
    STATIC_PLATEAU = "static_plateau"
    DYNAMIC_SPIKE = "dynamic_spike"


@dataclass(frozen=True)
class Event:
    """Detected plateau or spike; amplitude is plateau mean or spike peak."""

    kind: EventKind
    t_start_s: float
    t_end_s: float
    amplitude_v: float
    polarity: int = 0
    lobe_polarities: tuple[int, ...] = ()

    def __post_init__(self):
        if self.t_end_s < self.t_start_s:
            raise DomainError("event must end at or after its start")


class CommandKind(enum.Enum):
    BEND = "bend"
    TRIGGER = "trigger"


@dataclass(frozen=True)
class ControlCommand:
    """Bend(level in [0,1], clamped) or Trigger(gesture in {1,2,3})."""

    t_s: float
    kind: CommandKind
    level: float | None = None
    gesture: int | None = None

    def __post_init__(self):
        if self.kind is CommandKind.BEND:
            if self.level is None:
                raise ConfigError("Bend command needs a level")
            object.__setattr__(self, "level", min(max(float(self.level), 0.0), 1.0))
        elif self.kind is CommandKind.TRIGGER:
            if self.gesture not in (1, 2, 3):
                raise ConfigError("Trigger gesture must be 1, 2 or 3")

    @property
    def value(self) -> float:
        return self.level if self.kind is CommandKind.BEND else float(self.gesture)


@dataclass(frozen=True)
class HandState:
    """Five finger angles in degrees, 0 = extended, 90 = fully bent."""

    finger_angles_deg: tuple[float, float, float, float, float] = (0.0,) * 5
    grasp_closed: bool = False

    def __post_init__(self):
        angles = tuple(float(a) for a in self.finger_angles_deg)
        if len(angles) != 5 or any(not 0.0 <= a <= 90.0 for a in angles):
            raise DomainError("finger angles must be 5 values in [0, 90] degrees")
        object.__setattr__(self, "finger_angles_deg", angles)


@dataclass(frozen=True)
class ChannelModel:
    """Wireless link stand-in: fixed latency plus seeded independent drops."""

    latency_s: float = 0.0
    drop_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.latency_s < 0:
            raise ConfigError("latency_s must be non-negative")
        if not 0.0 <= self.drop_probability < 1.0:
            raise ConfigError("drop_probability must be in [0, 1)")


@dataclass(frozen=True)
class ClassifyConfig:
    """Thresholds for plateau and spike detection."""

    dc_threshold_v: float = 0.5
    hold_ms: float = 300.0
    ac_threshold_v: float = 0.5
    hysteresis: float = 0.5
    pair_width_factor: float = 1.5

    def __post_init__(self):
        if self.dc_threshold_v <= 0 or self.ac_threshold_v <= 0:
            raise ConfigError("thresholds must be positive")
        if self.hold_ms <= 0:
            raise ConfigError("hold_ms must be positive")
        if not 0 < self.hysteresis <= 1:
            raise ConfigError("hysteresis must be in (0, 1]")
        if self.pair_width_factor <= 0:
            raise ConfigError("pair_width_factor must be positive")


@dataclass(frozen=True)
class ControlMapping:
    """Voltage-to-bend endpoints, gesture window, command emission rate."""

    v_zero_v: float = -0.152
    v_full_v: float = 4.014
    gesture_window_ms: float = 800.0
    control_rate_hz: float = 50.0

    def __post_init__(self):
        if self.v_full_v <= self.v_zero_v:
            raise ConfigError("v_full_v must exceed v_zero_v")
        if self.gesture_window_ms <= 0 or self.control_rate_hz <= 0:
            raise ConfigError("gesture window and control rate must be positive")


def _plateaus(dc: Trace, cfg: ClassifyConfig) -> list[Event]:
    v = dc.samples
    mask = np.abs(v) >= cfg.dc_threshold_v
    if not np.any(mask):
        return []
    m = mask.astype(np.int8)
    change = np.flatnonzero(m[1:] != m[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [m.size]))
    hold_n = cfg.hold_ms / 1e3 / dc.dt
    out = []
    for a, b in zip(starts, ends):
        if not mask[a] or (b - a) < hold_n:
            continue
        out.append(
            Event(
                kind=EventKind.STATIC_PLATEAU,
                t_start_s=dc.t0 + a * dc.dt,
                t_end_s=dc.t0 + b * dc.dt,
                amplitude_v=float(np.mean(v[a:b])),
            )
        )
    return out


def _spikes(ac: Trace, cfg: ClassifyConfig) -> list[Event]:
    lobes = find_excursions(ac.samples, cfg.ac_threshold_v, cfg.hysteresis)
    out = []
    i = 0
    while i < len(lobes):
        first = lobes[i]
        group = [first]
        # A bipolar +/- pair close in time is one physical tap: collapse the
        # opposite lobe when its peak arrives within pair_width_factor lobe
        # widths of the first peak.
        if i + 1 < len(lobes):
            nxt = lobes[i + 1]
            width = (first.end - first.start) * ac.dt
            gap = (nxt.peak_index - first.peak_index) * ac.dt
            if nxt.sign == -first.sign and gap <= cfg.pair_width_factor * width:
                group.append(nxt)
        peak = max(group, key=lambda e: abs(e.peak_value))
        out.append(
            Event(
                kind=EventKind.DYNAMIC_SPIKE,
                t_start_s=ac.t0 + group[0].start * ac.dt,
                t_end_s=ac.t0 + group[-1].end * ac.dt,
                amplitude_v=peak.peak_value,
                polarity=int(np.sign(peak.peak_value)),
                lobe_polarities=tuple(e.sign for e in group),
            )
        )
        i += len(group)
    return out


def classify(dc: Trace, ac: Trace, cfg: ClassifyConfig) -> list[Event]:
    """Detect StaticPlateau and DynamicSpike events, time-ordered."""
    if abs(ac.dt - dc.dt) > 1e-12 * dc.dt or abs(ac.t0 - dc.t0) > 1e-9:
        ac = Trace(dc.t0, dc.dt, np.interp(dc.times, ac.times, ac.samples), ac.channel)
    events = _plateaus(dc, cfg) + _spikes(ac, cfg)
    events.sort(key=lambda e: (e.t_start_s, e.kind.value))
    return events


def map_control(
    events: list[Event], dc: Trace | None, mapping: ControlMapping
) -> list[ControlCommand]:
    """Translate events into Bend and Trigger commands.

    Each plateau emits Bend at the control rate with the level read off the
    DC trace at emission time, linearly mapped from [v_zero, v_full] and
    clamped to [0, 1].  Without a DC trace the plateau's own amplitude sets
    the level for its whole duration.  Spikes starting within the gesture
    window of the first spike of a group count toward one saturating
    Trigger.
    """
    cmds: list[ControlCommand] = []
    span = mapping.v_full_v - mapping.v_zero_v
    for ev in events:
        if ev.kind is not EventKind.STATIC_PLATEAU:
            continue
        step = 1.0 / mapping.control_rate_hz
        t = ev.t_start_s
        while t <= ev.t_end_s:
            v = dc.value_at(t) if dc is not None else ev.amplitude_v
            level = (v - mapping.v_zero_v) / span
            cmds.append(ControlCommand(t_s=t, kind=CommandKind.BEND, level=level))
            t += step

    spikes = [e for e in events if e.kind is EventKind.DYNAMIC_SPIKE]
    window = mapping.gesture_window_ms / 1e3
    i = 0
    while i < len(spikes):
        j = i
        while j + 1 < len(spikes) and spikes[j + 1].t_start_s - spikes[i].t_start_s <= window:
            j += 1
        count = min(j - i + 1, 3)
        cmds.append(
            ControlCommand(t_s=spikes[j].t_end_s, kind=CommandKind.TRIGGER, gesture=count)
        )
        i = j + 1

    cmds.sort(key=lambda c: c.t_s)
    return cmds


def transmit(cmds: list[ControlCommand], ch: ChannelModel) -> list[ControlCommand]:
    """Delay every command by the latency; drop each independently, seeded."""
    rng = np.random.Generator(np.random.PCG64(ch.seed))
    out = []
    for c in cmds:
        if ch.drop_probability > 0 and rng.random() < ch.drop_probability:
            continue
        out.append(replace(c, t_s=c.t_s + ch.latency_s))
    return out


#: Gesture poses: n extended fingers (0 deg), counting from the index.
GESTURE_POSES: dict[int, tuple[float, ...]] = {
    1: (90.0, 0.0, 90.0, 90.0, 90.0),
    2: (90.0, 0.0, 0.0, 90.0, 90.0),
    3: (90.0, 0.0, 0.0, 0.0, 90.0),
}


def gesture_pose(n: int) -> tuple[float, ...]:
    """Finger-angle targets for gesture n (1..3)."""
    if n not in GESTURE_POSES:
        raise ConfigError("gesture must be 1, 2 or 3")
    return GESTURE_POSES[n]


@dataclass(frozen=True)
class HandTrajectory:
    """Uniformly sampled hand pose history; angles shape (n, 5) degrees."""

    t0: float
    dt: float
    angles_deg: np.ndarray

    def __post_init__(self):
        a = np.array(self.angles_deg, dtype=np.float64, copy=True)
        if a.ndim != 2 or a.shape[1] != 5 or a.shape[0] == 0:
            raise DomainError("angles must have shape (n, 5)")
        a.flags.writeable = False
        object.__setattr__(self, "angles_deg", a)

    @property
    def n(self) -> int:
        return self.angles_deg.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def state_at(self, t: float) -> HandState:
        i = min(max(int(round((t - self.t0) / self.dt)), 0), self.n - 1)
        angles = tuple(float(x) for x in self.angles_deg[i])
        return HandState(angles, grasp_closed=all(a >= 45.0 for a in angles))

    @property
    def final_state(self) -> HandState:
        return self.state_at(self.t0 + (self.n - 1) * self.dt)


def actuate(
    cmds: list[ControlCommand],
    initial: HandState | None = None,
    *,
    tau_act_s: float = 0.05,
    sim_rate_hz: float = 200.0,
    settle_s: float = 0.5,
) -> HandTrajectory:
    """Drive the hand through the command sequence with first-order servos.

    Bend sets all finger targets to level*90 deg; Trigger latches the
    gesture pose.  The trajectory runs from the earlier of 0 and the first
    command to the last command plus settle_s.
    """
    if tau_act_s <= 0 or sim_rate_hz <= 0 or settle_s < 0:
        raise ConfigError("tau_act_s and sim_rate_hz must be positive, settle_s >= 0")
    if initial is None:
        initial = HandState()
    dt = 1.0 / sim_rate_hz
    ordered = sorted(cmds, key=lambda c: c.t_s)
    t0 = min(0.0, ordered[0].t_s) if ordered else 0.0
    t_end = (ordered[-1].t_s if ordered else 0.0) + settle_s
    n = max(int(round((t_end - t0) / dt)) + 1, 1)

    targets = np.empty((n, 5))
    targets[:] = np.asarray(initial.finger_angles_deg)
    for c in ordered:
        i = min(max(int(round((c.t_s - t0) / dt)), 0), n - 1)
        pose = (
            tuple(c.level * 90.0 for _ in range(5))
            if c.kind is CommandKind.BEND
            else gesture_pose(c.gesture)
        )
        targets[i:] = pose

    k = 1.0 - np.exp(-dt / tau_act_s)
    angles = np.empty_like(targets)
    for f in range(5):
        angles[:, f] = _kernels.track_asymmetric(
            targets[:, f], float(initial.finger_angles_deg[f]), k, k
        )
    np.clip(angles, 0.0, 90.0, out=angles)
    return HandTrajectory(t0, dt, angles)
