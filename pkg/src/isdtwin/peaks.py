"""Signed threshold-excursion scanning with hysteresis.

Shared by pulse conditioning (to locate input pulses) and event
classification (to find dynamic spikes).  An excursion is a maximal run of
samples of one sign staying beyond the exit level (hysteresis x threshold)
whose extreme value also reaches the full threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Excursion:
    """One signed excursion: [start, end) sample window and its peak."""

    start: int
    end: int
    peak_index: int
    peak_value: float
    sign: int


def find_excursions(x: np.ndarray, threshold: float, hysteresis: float = 0.5) -> list[Excursion]:
    """All excursions of |x| beyond threshold, time-ordered.

    A run begins when |x| rises past hysteresis*threshold, keeps one sign,
    and qualifies only if its extreme reaches threshold.  Sign flips end
    the run, so the two lobes of a bipolar pulse come back as two
    excursions.
    """
    if threshold <= 0:
        raise ConfigError("threshold must be positive")
    if not 0 < hysteresis <= 1:
        raise ConfigError("hysteresis must be in (0, 1]")
    v = np.asarray(x, dtype=np.float64)
    lo = hysteresis * threshold
    s = np.where(v >= lo, 1, np.where(v <= -lo, -1, 0)).astype(np.int8)
    if v.size == 0:
        return []
    change = np.flatnonzero(s[1:] != s[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [s.size]))
    out = []
    for a, b in zip(starts, ends):
        sign = int(s[a])
        if sign == 0:
            continue
        seg = v[a:b]
        rel = int(np.argmax(seg)) if sign > 0 else int(np.argmin(seg))
        peak = float(seg[rel])
        if abs(peak) < threshold:
            continue
        out.append(Excursion(start=int(a), end=int(b), peak_index=int(a + rel), peak_value=peak, sign=sign))
    return out
