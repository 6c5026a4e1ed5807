"""Characterization: curve fitting and headline-metric extraction.

Fits are deliberately grid-plus-refinement rather than gradient descent:
the data sets are tens of points, so exhaustive search is cheap, and a
fixed search order makes every fit bit-deterministic.  Pressures are
rescaled to kPa and voltages normalized to their absolute maximum before
solving, then results are reported back in SI units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DetectionError, FitError
from .physics import DynamicParams, dynamic_voltage
from .trace import Trace
from .transducer import ResponseDynamics


@dataclass(frozen=True)
class PVSamples:
    """Pressure/voltage sample set for fitting; P strictly increasing."""

    pressures_pa: np.ndarray
    voltages_v: np.ndarray
    mode: str = "static"

    def __post_init__(self):
        P = np.array(self.pressures_pa, dtype=np.float64, copy=True)
        V = np.array(self.voltages_v, dtype=np.float64, copy=True)
        if P.ndim != 1 or V.shape != P.shape:
            raise FitError("pressures and voltages must be 1-D arrays of equal length")
        if P.size < 4:
            raise FitError("need at least 4 points")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(V))):
            raise FitError("samples must be finite")
        if np.any(np.diff(P) <= 0):
            raise FitError("pressures must be strictly increasing")
        if self.mode not in ("static", "dynamic"):
            raise FitError(f"mode must be 'static' or 'dynamic', got {self.mode!r}")
        P.flags.writeable = False
        V.flags.writeable = False
        object.__setattr__(self, "pressures_pa", P)
        object.__setattr__(self, "voltages_v", V)

    @property
    def n(self) -> int:
        return self.pressures_pa.size


@dataclass(frozen=True)
class PiecewiseFit:
    """Continuous piecewise-linear fit: n segments, n-1 breakpoints."""

    breakpoints_pa: tuple[float, ...]
    slopes_v_per_pa: tuple[float, ...]
    intercepts_v: tuple[float, ...]
    rmse_v: float
    p_min_pa: float
    p_max_pa: float

    @property
    def n_segments(self) -> int:
        return len(self.slopes_v_per_pa)

    def predict(self, P) -> np.ndarray:
        Pa = np.asarray(P, dtype=np.float64)
        idx = np.searchsorted(np.asarray(self.breakpoints_pa), Pa, side="right")
        out = np.asarray(self.intercepts_v)[idx] + np.asarray(self.slopes_v_per_pa)[idx] * Pa
        return float(out) if np.ndim(P) == 0 else out


@dataclass(frozen=True)
class ExpFit:
    """Saturating-exponential fit V_max*(1 - exp(-k*P))."""

    V_max_v: float
    k_per_pa: float
    rmse_v: float

    def predict(self, P) -> np.ndarray:
        Pa = np.asarray(P, dtype=np.float64)
        out = self.V_max_v * -np.expm1(-self.k_per_pa * Pa)
        return float(out) if np.ndim(P) == 0 else out


def piecewise_eval(P, breakpoints_pa, slopes_v_per_pa, v0: float = 0.0):
    """Continuous piecewise-linear curve anchored at V(0) = v0.

    Convenience generator for synthetic data; segment j has the given
    slope, and segments join continuously at the breakpoints.
    """
    breaks = np.asarray(breakpoints_pa, dtype=np.float64)
    slopes = np.asarray(slopes_v_per_pa, dtype=np.float64)
    if breaks.size != slopes.size - 1:
        raise ConfigError("need one more slope than breakpoints")
    intercepts = np.empty_like(slopes)
    intercepts[0] = v0
    for j in range(breaks.size):
        intercepts[j + 1] = intercepts[j] + (slopes[j] - slopes[j + 1]) * breaks[j]
    Pa = np.asarray(P, dtype=np.float64)
    idx = np.searchsorted(breaks, Pa, side="right")
    out = intercepts[idx] + slopes[idx] * Pa
    return float(out) if np.ndim(P) == 0 else out


def _suffix_sums(x: np.ndarray) -> np.ndarray:
    # out[i] = sum of x[i:], with a trailing 0 so out[m] is valid.
    out = np.zeros(x.size + 1)
    out[:-1] = np.cumsum(x[::-1])[::-1]
    return out


def _hinge_design(P: np.ndarray, breaks) -> np.ndarray:
    cols = [np.ones_like(P), P]
    for b in breaks:
        cols.append(np.maximum(P - b, 0.0))
    return np.stack(cols, axis=1)


def _sse_for_breaks(P: np.ndarray, V: np.ndarray, breaks) -> tuple[float, np.ndarray]:
    X = _hinge_design(P, breaks)
    beta, *_ = np.linalg.lstsq(X, V, rcond=None)
    r = V - X @ beta
    return float(r @ r), beta


def _golden_min(f, lo: float, hi: float, iters: int = 100) -> float:
    """Deterministic golden-section minimizer; returns the best abscissa."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        if (b - a) <= 1e-13 * max(abs(a), abs(b), 1.0):
            break
    return c if fc <= fd else d


def fit_piecewise(data: PVSamples, n_segments: int) -> PiecewiseFit:
    """Continuous piecewise-linear least squares with free breakpoints.

    Breakpoint candidates are the midpoints between consecutive data
    pressures; every candidate combination leaving at least 2 points per
    segment is scored through suffix-sum normal equations in one batched
    solve, ties resolved to the lexicographically smallest breakpoint
    vector, and the winner's breakpoints are refined one at a time by
    golden section inside their data gaps.
    """
    if not isinstance(n_segments, int) or not 1 <= n_segments <= 4:
        raise ConfigError("n_segments must be an integer in [1, 4]")
    m = data.n
    if m < 2 * n_segments:
        raise FitError(f"{m} points cannot support {n_segments} segments (need >= 2 per segment)")

    P = data.pressures_pa / 1e3
    vscale = float(np.max(np.abs(data.voltages_v)))
    if vscale == 0.0:
        vscale = 1.0
    V = data.voltages_v / vscale

    def finish(breaks, beta, sse):
        slopes = [float(beta[1])]
        for j in range(len(breaks)):
            slopes.append(slopes[-1] + float(beta[2 + j]))
        intercepts = [float(beta[0])]
        for j, b in enumerate(breaks):
            intercepts.append(intercepts[-1] - float(beta[2 + j]) * b)
        return PiecewiseFit(
            breakpoints_pa=tuple(float(b) * 1e3 for b in breaks),
            slopes_v_per_pa=tuple(s * vscale / 1e3 for s in slopes),
            intercepts_v=tuple(a * vscale for a in intercepts),
            rmse_v=math.sqrt(max(sse, 0.0) / m) * vscale,
            p_min_pa=float(data.pressures_pa[0]),
            p_max_pa=float(data.pressures_pa[-1]),
        )

    if n_segments == 1:
        sse, beta = _sse_for_breaks(P, V, ())
        return finish([], beta, sse)

    nb = n_segments - 1
    # Split index c puts points [0, c) left of the break; midpoint candidate.
    cand = list(range(2, m - 1))
    combos = [
        c
        for c in itertools.combinations(cand, nb)
        if all(c[i + 1] - c[i] >= 2 for i in range(nb - 1))
    ]
    if not combos:
        raise FitError("insufficient points per candidate segment")
    C = np.asarray(combos, dtype=np.int64)
    B = (P[C - 1] + P[C]) / 2.0

    S0 = np.arange(m, -1, -1, dtype=np.float64)
    S1 = _suffix_sums(P)
    S2 = _suffix_sums(P * P)
    SV = _suffix_sums(V)
    SPV = _suffix_sums(P * V)
    SVV = float(V @ V)

    nc, k = C.shape[0], nb + 2
    G = np.empty((nc, k, k))
    rhs = np.empty((nc, k))
    G[:, 0, 0] = m
    G[:, 0, 1] = G[:, 1, 0] = S1[0]
    G[:, 1, 1] = S2[0]
    rhs[:, 0] = SV[0]
    rhs[:, 1] = SPV[0]
    for j in range(nb):
        cj = C[:, j]
        bj = B[:, j]
        G[:, 0, 2 + j] = G[:, 2 + j, 0] = S1[cj] - bj * S0[cj]
        G[:, 1, 2 + j] = G[:, 2 + j, 1] = S2[cj] - bj * S1[cj]
        rhs[:, 2 + j] = SPV[cj] - bj * SV[cj]
        for i in range(j + 1):
            bi = B[:, i]
            G[:, 2 + i, 2 + j] = G[:, 2 + j, 2 + i] = (
                S2[cj] - (bi + bj) * S1[cj] + bi * bj * S0[cj]
            )

    beta_all = np.linalg.solve(G, rhs[..., None])[..., 0]
    sse_all = SVV - np.einsum("ij,ij->i", beta_all, rhs)
    best = int(np.argmin(sse_all))

    # Coordinate refinement.  Each break searches its candidate's Voronoi
    # cell (out to the neighboring gap midpoints), so an optimum sitting
    # just across a data point is still reachable; the gap is re-derived
    # every sweep because a break may cross a data point while moving.
    breaks = [float(x) for x in B[best]]
    span = float(P[-1] - P[0])
    for _ in range(5):
        for j in range(nb):
            c = int(np.searchsorted(P, breaks[j], side="left"))
            c = min(max(c, 2), m - 2)
            lo = (P[c - 2] + P[c - 1]) / 2 if c >= 3 else float(P[c - 1])
            hi = (P[c] + P[c + 1]) / 2 if c <= m - 3 else float(P[c])
            if j > 0:
                lo = max(lo, breaks[j - 1] + 1e-9 * span)
            if j < nb - 1:
                hi = min(hi, breaks[j + 1] - 1e-9 * span)
            if hi <= lo:
                continue
            pad = 1e-9 * (hi - lo)

            def sse_of(b, j=j):
                trial = breaks[:j] + [b] + breaks[j + 1 :]
                return _sse_for_breaks(P, V, trial)[0]

            breaks[j] = _golden_min(sse_of, lo + pad, hi - pad)

    sse, beta = _sse_for_breaks(P, V, breaks)
    return finish(breaks, beta, sse)


def fit_exponential(data: PVSamples) -> ExpFit:
    """Least-squares fit of V_max*(1 - exp(-k*P)).

    For fixed k the optimal V_max is closed-form, so the search is 1-D: a
    coarse logarithmic grid over k followed by golden-section refinement
    in log k between the best grid point's neighbors.
    """
    P = data.pressures_pa
    V = data.voltages_v
    p_pos = P[P > 0]
    if p_pos.size == 0 or p_pos[-1] / p_pos[0] < 10.0:
        raise FitError("data must span at least one decade of pressure")
    with np.errstate(invalid="ignore"):
        corr = np.corrcoef(P, V)[0, 1]
    if not np.isfinite(corr) or corr <= 0:
        raise FitError("no rising trend: correlation of V with P is not positive")

    Pk = P / 1e3
    vscale = float(np.max(np.abs(V)))
    if vscale == 0.0:
        vscale = 1.0
    Vn = V / vscale
    svv = float(Vn @ Vn)

    def sse_vmax(log10_k):
        mvec = -np.expm1(-(10.0**log10_k) * Pk)
        den = float(mvec @ mvec)
        if den <= 0:
            return math.inf, 0.0
        num = float(mvec @ Vn)
        return svv - num * num / den, num / den

    pk_pos = Pk[Pk > 0]
    lg_lo = math.log10(1e-2 / float(pk_pos[-1]))
    lg_hi = math.log10(5e1 / float(pk_pos[0]))
    grid = np.linspace(lg_lo, lg_hi, 600)
    sses = np.array([sse_vmax(g)[0] for g in grid])
    i0 = int(np.argmin(sses))
    lo = grid[max(i0 - 1, 0)]
    hi = grid[min(i0 + 1, grid.size - 1)]
    lg = _golden_min(lambda g: sse_vmax(g)[0], lo, hi, iters=120)
    sse, vmax_n = sse_vmax(lg)
    if vmax_n <= 0:
        raise FitError("fit collapsed to non-positive saturation voltage")
    return ExpFit(
        V_max_v=vmax_n * vscale,
        k_per_pa=(10.0**lg) / 1e3,
        rmse_v=math.sqrt(max(sse, 0.0) / data.n) * vscale,
    )


@dataclass(frozen=True)
class SensitivityRow:
    """One region of the sensitivity table; p_lo == p_hi for point rows."""

    p_lo_pa: float
    p_hi_pa: float
    sensitivity_v_per_pa: float


def sensitivity_report(
    fit: PiecewiseFit | ExpFit, at_pressures_pa=None
) -> list[SensitivityRow]:
    """Region table: per-segment slopes, or point sensitivities for ExpFit."""
    if isinstance(fit, PiecewiseFit):
        bounds = [fit.p_min_pa, *fit.breakpoints_pa, fit.p_max_pa]
        return [
            SensitivityRow(bounds[i], bounds[i + 1], fit.slopes_v_per_pa[i])
            for i in range(fit.n_segments)
        ]
    if isinstance(fit, ExpFit):
        if at_pressures_pa is None:
            raise ConfigError("exponential reports need at_pressures_pa")
        rows = []
        for p in np.asarray(at_pressures_pa, dtype=np.float64):
            s = fit.V_max_v * fit.k_per_pa * math.exp(-fit.k_per_pa * p)
            rows.append(SensitivityRow(float(p), float(p), s))
        return rows
    raise ConfigError(f"unsupported fit type: {type(fit).__name__}")


@dataclass(frozen=True)
class ResponseTimes:
    rise_ms: float
    fall_ms: float


def _cross(v: np.ndarray, thr: float, start: float, direction: int) -> float:
    """Fractional sample index of the next threshold crossing after start."""
    if direction > 0:
        hits = np.flatnonzero((v[:-1] < thr) & (v[1:] >= thr))
    else:
        hits = np.flatnonzero((v[:-1] > thr) & (v[1:] <= thr))
    hits = hits[hits >= start]
    if hits.size == 0:
        raise DetectionError("no monotone transition found for threshold crossing")
    i = int(hits[0])
    return i + (thr - v[i]) / (v[i + 1] - v[i])


def extract_response_times(step_dc: Trace) -> ResponseTimes:
    """10-90% rise and 90-10% fall times of one step-and-release cycle.

    Thresholds sit at 10% and 90% of the trace's full amplitude; crossing
    instants are linearly interpolated between samples.
    """
    v = step_dc.samples
    v_lo = float(v.min())
    amp = float(v.max()) - v_lo
    if amp <= 0:
        raise DetectionError("trace is flat: no transitions to time")
    t10 = v_lo + 0.1 * amp
    t90 = v_lo + 0.9 * amp
    x_up10 = _cross(v, t10, 0, +1)
    x_up90 = _cross(v, t90, x_up10, +1)
    x_dn90 = _cross(v, t90, x_up90, -1)
    x_dn10 = _cross(v, t10, x_dn90, -1)
    ms = step_dc.dt * 1e3
    return ResponseTimes(rise_ms=(x_up90 - x_up10) * ms, fall_ms=(x_dn10 - x_dn90) * ms)


def detection_limit(
    params: DynamicParams,
    dyn: ResponseDynamics,
    criterion: float = 3.0,
    *,
    p_min_pa: float = 1.0,
    p_max_pa: float = 1e5,
    points_per_decade: int = 200,
) -> float:
    """Smallest grid pressure whose dynamic response clears criterion*noise.

    The grid is logarithmic from p_min_pa to p_max_pa, so the result's
    granularity is one grid step.
    """
    if dyn.noise_rms_v <= 0:
        raise ConfigError("detection limit needs noise_rms_v > 0")
    if criterion <= 0:
        raise ConfigError("criterion must be positive")
    decades = math.log10(p_max_pa / p_min_pa)
    n = int(math.floor(decades * points_per_decade)) + 1
    grid = p_min_pa * 10.0 ** (np.arange(n) / points_per_decade)
    resp = np.asarray(dynamic_voltage(params, grid))
    mask = resp >= criterion * dyn.noise_rms_v
    if not np.any(mask):
        raise DetectionError("response never clears the noise criterion on the grid")
    return float(grid[int(np.argmax(mask))])
