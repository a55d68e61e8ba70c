"""Numerical kernels shared by the physics modules.

Adaptive Gauss-Kronrod quadrature, a Gaussian nascent delta, central finite
differences and the tapering window used for truncated momentum integrals.

Complex values are plain Python/numpy complex numbers. Integrands passed to
:func:`integrate` must be vectorized: they receive a 1-D float array of nodes
and return an array whose first axis matches it (extra trailing axes are
integrated component-wise).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergent

# Gauss-Kronrod 7/15 abscissae on [-1, 1] (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss points are the odd-indexed Kronrod abscissae (1, 3, 5, centre).
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]


@dataclass(frozen=True)
class Quadrature:
    """Tolerances and subdivision budget for adaptive integration."""

    absolute_tolerance: float = 1e-10
    relative_tolerance: float = 1e-8
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not (self.absolute_tolerance > 0 and self.relative_tolerance > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = Quadrature()


@dataclass(frozen=True)
class QuadResult:
    value: complex | np.ndarray
    error: float
    intervals: int
    truncation_radius: float | None = None


def _gk15(f, a, b):
    """Kronrod and Gauss estimates on every interval [a_i, b_i] at once."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(f(x))
    if y.shape[0] != x.size:
        raise ValueError("integrand must return one value per node along axis 0")
    y = y.reshape((a.size, 15) + y.shape[1:])
    scale = half.reshape((-1,) + (1,) * (y.ndim - 2))
    kron = np.tensordot(_KRONROD_W, y, axes=([0], [1])) * scale
    gauss = np.tensordot(_GAUSS_W, y, axes=([0], [1])) * scale
    err = np.abs(kron - gauss)
    if err.ndim > 1:
        err = err.reshape(a.size, -1).max(axis=1)
    return kron, err


def integrate_detail(f: Callable, lo: float, hi: float,
                     q: Quadrature = DEFAULT_QUADRATURE) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over [lo, hi].

    Every interval whose error estimate exceeds its proportional share of the
    tolerance is bisected, in batches, until the summed error drops below
    ``max(abs_tol, rel_tol * |value|)``.

    Raises
    ------
    NonConvergent
        If more than ``q.max_subdivisions`` intervals would be needed. The
        exception carries the best estimate and its error bound.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a = np.array([float(lo)])
    b = np.array([float(hi)])
    vals, errs = _gk15(f, a, b)
    done_val = 0.0
    done_err = 0.0
    retired = 0
    while True:
        total = done_val + vals.sum(axis=0)
        total_err = done_err + errs.sum()
        tol = max(q.absolute_tolerance, q.relative_tolerance * float(np.max(np.abs(total))))
        if not np.all(np.isfinite(total)):
            raise NonConvergent("integrand produced non-finite values", total, math.inf)
        if total_err <= tol:
            return QuadResult(_squeeze(total), float(total_err), a.size + retired)
        share = tol * (b - a) / (hi - lo)
        split = errs > share
        # Converged intervals are retired so they are not re-examined.
        keep = ~split
        done_val = done_val + vals[keep].sum(axis=0)
        done_err += errs[keep].sum()
        retired += int(np.count_nonzero(keep))
        a, b = a[split], b[split]
        if 2 * a.size + retired > q.max_subdivisions or not np.all((b - a) > 0):
            raise NonConvergent(
                f"subdivision budget of {q.max_subdivisions} exhausted "
                f"(error {total_err:.3e} > tolerance {tol:.3e})",
                _squeeze(total), float(total_err))
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        vals, errs = _gk15(f, a, b)


def _squeeze(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def integrate(f: Callable, lo: float, hi: float,
              q: Quadrature = DEFAULT_QUADRATURE) -> complex:
    """Integral of a vectorized (possibly complex) ``f`` over [lo, hi]."""
    return integrate_detail(f, lo, hi, q).value


def truncation_radius(envelope: Callable[[float], float], threshold: float,
                      center: float = 0.0, scale: float = 1.0) -> float:
    """Smallest radius (to 1 %) beyond which ``envelope`` stays below ``threshold``.

    ``envelope`` is assumed non-increasing in ``|x - center|``.
    """
    r = scale
    for _ in range(200):
        if max(envelope(center + r), envelope(center - r)) < threshold:
            break
        r *= 2.0
    else:
        raise NonConvergent("envelope never falls below the truncation threshold")
    lo, hi = 0.0, r
    while hi - lo > 0.01 * hi:
        mid = 0.5 * (lo + hi)
        if max(envelope(center + mid), envelope(center - mid)) < threshold:
            hi = mid
        else:
            lo = mid
    return hi


def integrate_infinite(f: Callable, envelope: Callable[[float], float],
                       center: float = 0.0, scale: float = 1.0,
                       q: Quadrature = DEFAULT_QUADRATURE) -> QuadResult:
    """Integral over the real line, truncated where ``envelope < abs_tol / 100``."""
    r = truncation_radius(envelope, q.absolute_tolerance / 100.0, center, scale)
    res = integrate_detail(f, center - r, center + r, q)
    return QuadResult(res.value, res.error, res.intervals, truncation_radius=r)


def integrate_samples(y, x) -> complex | np.ndarray:
    """Trapezoid rule on a sampled integrand (last axis).

    For smooth integrands that have decayed at both grid edges this converges
    spectrally, which is the regime the sampled-field routines require.
    """
    return np.trapezoid(y, x, axis=-1)


@dataclass(frozen=True)
class NascentDelta:
    """Gaussian of width ``width_sigma`` converging weakly to the Dirac delta."""

    width_sigma: float
    kind: str = "gaussian"

    def __post_init__(self):
        if not self.width_sigma > 0:
            raise ValueError("width_sigma must be positive")
        if self.kind != "gaussian":
            raise ValueError(f"unsupported nascent delta kind {self.kind!r}")

    def __call__(self, x):
        return nascent_delta_eval(self, x)

    @property
    def support_radius(self) -> float:
        # exp(-r^2/2) < 1e-16 relative to the peak
        return 8.6 * self.width_sigma


def nascent_delta_eval(d: NascentDelta, x):
    s = d.width_sigma
    return np.exp(-0.5 * (np.asarray(x) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))


def weak_pairing(d: NascentDelta, f: Callable, at: float = 0.0,
                 q: Quadrature = DEFAULT_QUADRATURE) -> complex:
    """``∫ δ_σ(x - at) f(x) dx``; tends to ``f(at)`` as σ → 0."""
    r = d.support_radius
    return integrate(lambda x: d(x - at) * f(x), at - r, at + r, q)


def finite_diff_1st(f: Callable, t: float, h: float):
    if not h > 0:
        raise ValueError("step must be positive")
    return (f(t + h) - f(t - h)) / (2.0 * h)


def finite_diff_2nd(f: Callable, t: float, h: float):
    """Central second difference ``(f(t+h) - 2 f(t) + f(t-h)) / h**2``."""
    if not h > 0:
        raise ValueError("step must be positive")
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)


def cosine_taper(p, p_max: float, fraction: float = 0.1):
    """Window equal to 1 on ``|p| <= (1-fraction) p_max`` rolling to 0 at ``p_max``."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("taper fraction must lie in [0, 1]")
    p = np.abs(np.asarray(p, dtype=float))
    if fraction == 0.0:
        return (p <= p_max).astype(float)
    p_in = (1.0 - fraction) * p_max
    u = np.clip((p - p_in) / (p_max - p_in), 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(np.pi * u))
