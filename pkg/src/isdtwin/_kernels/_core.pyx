# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sequential kernels.

These loops carry state from sample to sample (the update coefficient
depends on a comparison against the previous output), so they cannot be
vectorized.  The arithmetic is restricted to +, -, * in an order identical
to the pure-Python fallback so both backends produce bit-identical output.
"""


def track_asymmetric(double[::1] target, double y0, double k_rise,
                     double k_fall, double[::1] out):
    """First-order tracker with direction-dependent update coefficient.

    y[i] = y[i-1] + (target[i] - y[i-1]) * k, with k = k_rise when the
    target is above the current output and k_fall otherwise.  k values are
    precomputed by the caller as 1 - exp(-dt/tau).
    """
    cdef Py_ssize_t i, n = target.shape[0]
    cdef double y = y0
    cdef double t
    for i in range(n):
        t = target[i]
        if t > y:
            y = y + (t - y) * k_rise
        else:
            y = y + (t - y) * k_fall
        out[i] = y


def decay_accumulate(double[::1] inject, double a, double y0,
                     double[::1] out):
    """Leaky integrator: y[i] = y[i-1] * a + inject[i].

    Models an RC node that decays by factor a per sample while receiving
    impulsive charge injections.
    """
    cdef Py_ssize_t i, n = inject.shape[0]
    cdef double y = y0
    for i in range(n):
        y = y * a + inject[i]
        out[i] = y
