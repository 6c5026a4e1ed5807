"""Pure-Python kernels, used when the compiled extension is unavailable.

Each function mirrors the compiled version operation for operation: the
same +, -, * sequence on IEEE doubles, so outputs are bit-identical across
backends.  Inputs are converted to Python floats once up front; looping
over a list is several times faster than indexing numpy scalars.
"""

from __future__ import annotations


def track_asymmetric(target, y0, k_rise, k_fall, out):
    """First-order tracker with direction-dependent update coefficient."""
    y = float(y0)
    vals = target.tolist()
    buf = [0.0] * len(vals)
    for i, t in enumerate(vals):
        if t > y:
            y = y + (t - y) * k_rise
        else:
            y = y + (t - y) * k_fall
        buf[i] = y
    out[:] = buf


def decay_accumulate(inject, a, y0, out):
    """Leaky integrator: y[i] = y[i-1] * a + inject[i]."""
    y = float(y0)
    a = float(a)
    vals = inject.tolist()
    buf = [0.0] * len(vals)
    for i, v in enumerate(vals):
        y = y * a + v
        buf[i] = y
    out[:] = buf
