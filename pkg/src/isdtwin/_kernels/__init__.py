"""Sequential state-carrying kernels with compiled and pure-Python backends.

The compiled extension is preferred when it imported cleanly; set the
environment variable ``ISD_NO_EXT`` (any non-empty value) to force the
pure-Python fallback.  Both backends produce bit-identical output, so the
choice only affects speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

_impl = _fallback
_backend = "python"

if not os.environ.get("ISD_NO_EXT"):
    try:
        from . import _core as _compiled

        _impl = _compiled
        _backend = "compiled"
    except ImportError:
        pass


def backend_name() -> str:
    """Which kernel backend is active: 'compiled' or 'python'."""
    return _backend


def track_asymmetric(target: np.ndarray, y0: float, k_rise: float, k_fall: float) -> np.ndarray:
    """First-order tracking of target with per-direction coefficients.

    y[i] = y[i-1] + (target[i] - y[i-1]) * k, k = k_rise while rising
    toward the target and k_fall while falling.  Coefficients come from
    k = 1 - exp(-dt/tau); the caller precomputes them so both backends
    stay within +, -, * arithmetic.
    """
    tgt = np.ascontiguousarray(target, dtype=np.float64)
    out = np.empty_like(tgt)
    _impl.track_asymmetric(tgt, float(y0), float(k_rise), float(k_fall), out)
    return out


def decay_accumulate(inject: np.ndarray, a: float, y0: float = 0.0) -> np.ndarray:
    """Leaky integrator y[i] = y[i-1]*a + inject[i] over the whole array."""
    inj = np.ascontiguousarray(inject, dtype=np.float64)
    out = np.empty_like(inj)
    _impl.decay_accumulate(inj, float(a), float(y0), out)
    return out
