"""Two-particle EPR state in the PF picture.

Two free particles of equal mass ``m`` leave a source with hidden momenta
``±p_P/2`` and initial separation ``x2(0) - x1(0) = x_0``. The joint field is a
plane wave in the relative coordinate ``x = x1 - x2`` with amplitude constant
``c_F``; the prepared delta state corresponds to the null field ``c_F = 0``.

Conventions:

* The free propagator uses the principal branch of ``√(m/(iħt))``, i.e. a
  constant ``e^{-iπ/4}`` phase.
* Delta functions are replaced by :class:`~pfield.numerics.NascentDelta` and
  every delta identity is checked weakly, against smooth test functions.
* Momentum integrals that do not decay are cut at ``±p_max`` with a cosine
  taper over the outer ``taper`` fraction.
* The joint-field exponent uses ``2ħ`` exactly as the relative-coordinate
  description gives it; no reduced-mass convention is imposed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import FieldKind, PhysicalParams, StationaryField
from .errors import NegativeTime, NonNullAmplitude, ZeroTime
from .momentum import MomentumPrep, de_broglie_momentum
from .numerics import (DEFAULT_QUADRATURE, NascentDelta, Quadrature, cosine_taper,
                       integrate)

SPIN_NOTE = ("Spin correlations are not modelled: only the original "
             "position/momentum EPR state is covered.")


@dataclass(frozen=True)
class EprScenario:
    """Hidden parameters of one EPR pair.

    ``x2_0`` is derived as ``x1_0 + x_0`` so the position prediction for the
    second particle holds bit-for-bit.
    """

    offset: float
    relative_momentum: float
    x1_0: float = 0.0
    field_constant: float = 0.0
    particle_amplitudes: tuple[float, float] = (0.0, 0.0)
    params: PhysicalParams = field(default_factory=PhysicalParams)

    @property
    def x2_0(self) -> float:
        return self.x1_0 + self.offset

    @property
    def p(self) -> float:
        """Momentum per particle, ``p_P / 2``."""
        return 0.5 * self.relative_momentum

    @property
    def relative_position_0(self) -> float:
        return self.x1_0 - self.x2_0


def free_propagator(x, t: float, x_src: float, params: PhysicalParams | None = None):
    """``K = √(m/(iħt)) exp[i m (x - x_src)² / (2ħt)]``."""
    pr = params or PhysicalParams()
    if not t > 0:
        raise ZeroTime(f"propagator needs t > 0, got {t!r}")
    m, hbar = pr.mass_m, pr.hbar
    pref = np.sqrt(m / (1j * hbar * t))
    return pref * np.exp(1j * m * (np.asarray(x) - x_src) ** 2 / (2.0 * hbar * t))


def evolve_delta(scn: EprScenario, x, t: float, sigma: float,
                 q: Quadrature = DEFAULT_QUADRATURE):
    """Propagate the regularized delta state ``δ_σ(x(0) + x_0)`` to time ``t``.

    Numerical convolution of :func:`free_propagator` with the nascent delta,
    vectorized over the relative coordinate ``x``.
    """
    if not t > 0:
        raise ZeroTime(f"evolution needs t > 0, got {t!r}")
    d = NascentDelta(sigma)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    c = -scn.offset
    r = d.support_radius

    def integrand(x0):
        k = free_propagator(xs[None, :], t, x0[:, None], scn.params)
        return k * d(x0 - c)[:, None]

    out = integrate(integrand, c - r, c + r, q)
    return out[0] if np.ndim(x) == 0 else out


def evolved_delta_closed_form(scn: EprScenario, x, t: float):
    """Limit ``σ → 0`` of :func:`evolve_delta`: the propagator from ``-x_0``."""
    return free_propagator(x, t, -scn.offset, scn.params)


def propagation_deviation(scn: EprScenario, xs, t: float, sigma: float,
                          q: Quadrature = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """How far the regularized evolution is from the closed form.

    Returns ``(modulus_dev, phase_dev)``: the relative spread of ``|X|`` over
    ``xs`` and the largest departure (radians) of ``arg X(x) - arg X(xs[0])``
    from ``m[(x+x_0)² - (xs[0]+x_0)²]/(2ħt)``.
    """
    xs = np.asarray(xs, dtype=float)
    vals = evolve_delta(scn, xs, t, sigma, q)
    mod = np.abs(vals)
    modulus_dev = float(mod.max() / mod.min() - 1.0)
    m, hbar = scn.params.mass_m, scn.params.hbar
    expected = m * ((xs + scn.offset) ** 2 - (xs[0] + scn.offset) ** 2) / (2.0 * hbar * t)
    wrapped = np.angle(vals * np.conj(vals[0]) * np.exp(-1j * expected))
    return modulus_dev, float(np.max(np.abs(wrapped)))


def joint_field(scn: EprScenario, x_rel, x_rel_0: float):
    """``c_F exp(i p_P x/(2ħ)) exp(-i p_P x(0)/(2ħ))``; the null field when ``c_F = 0``."""
    k = scn.relative_momentum / (2.0 * scn.params.hbar)
    return scn.field_constant * np.exp(1j * k * (np.asarray(x_rel) - x_rel_0))


# -- amplitude laws --------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeLaw:
    """Time-dependent field coefficient ``A(t)`` with its first two derivatives."""

    value: Callable
    first: Callable
    second: Callable
    name: str = "custom"

    @classmethod
    def sqrt_law(cls, c_f: float) -> AmplitudeLaw:
        return cls(lambda t: c_f * np.sqrt(t),
                   lambda t: 0.5 * c_f / np.sqrt(t),
                   lambda t: -0.25 * c_f * np.asarray(t) ** -1.5,
                   "c_F*sqrt(t)")

    @classmethod
    def linear_law(cls, c_f: float) -> AmplitudeLaw:
        return cls(lambda t: c_f * np.asarray(t, dtype=float),
                   lambda t: c_f * np.ones_like(np.asarray(t, dtype=float)),
                   lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                   "c_F*t")

    @classmethod
    def from_callable(cls, func: Callable, rel_step: float = 1e-4) -> AmplitudeLaw:
        """Derivatives by central differences with step ``rel_step * t``."""
        def first(t):
            t = np.asarray(t, dtype=float)
            h = rel_step * t
            return (func(t + h) - func(t - h)) / (2.0 * h)

        def second(t):
            t = np.asarray(t, dtype=float)
            h = rel_step * t
            return (func(t + h) - 2.0 * func(t) + func(t - h)) / h ** 2

        return cls(func, first, second, getattr(func, "__name__", "custom"))


def joint_field_at(scn: EprScenario, law: AmplitudeLaw, x_rel, t: float):
    """Time-dependent joint field ``A(t) t^(-1/2) exp(i p_P (x - x(0))/(2ħ))``."""
    k = scn.relative_momentum / (2.0 * scn.params.hbar)
    x0 = scn.relative_position_0
    return law.value(t) / math.sqrt(t) * np.exp(1j * k * (np.asarray(x_rel) - x0))


def field_speed(law: AmplitudeLaw, p_rel: float, t, params: PhysicalParams | None = None):
    """``|Ẋ| = t^(-1/2) [(Ȧ - A/2t)² + A²(p_P²/2mħ)²]^(1/2)``."""
    pr = params or PhysicalParams()
    beta = p_rel ** 2 / (2.0 * pr.mass_m * pr.hbar)
    t = np.asarray(t, dtype=float)
    a, ad = law.value(t), law.first(t)
    return np.sqrt((ad - a / (2.0 * t)) ** 2 + (a * beta) ** 2) / np.sqrt(t)


@dataclass(frozen=True)
class AmplitudeLawReport:
    law: str
    derivative_residual: float
    speed_residual: float
    balance_residual: float
    speeds: np.ndarray

    def passed(self, tol: float = 1e-10) -> bool:
        return max(self.derivative_residual, self.speed_residual, self.balance_residual) < tol

    def as_dict(self) -> dict:
        return {"law": self.law, "derivative_residual": self.derivative_residual,
                "speed_residual": self.speed_residual,
                "balance_residual": self.balance_residual,
                "speed_min": float(self.speeds.min()), "speed_max": float(self.speeds.max())}


def _ratio(num, den):
    num = np.abs(num)
    den = np.abs(den)
    out = np.zeros_like(num, dtype=float)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    out[~nz & (num > 0)] = math.inf
    return float(out.max()) if out.size else 0.0


def amplitude_law_check(c_f: float, p_rel: float, t_grid, law: AmplitudeLaw | None = None,
                        params: PhysicalParams | None = None) -> AmplitudeLawReport:
    """Test an amplitude law against the free-field condition ``d|Ẋ|/dt = 0``.

    Three relative residuals, each a maximum over ``t_grid``:

    * derivative: ``|Ȧ - A/2t|`` over ``|A|/2t``;
    * speed: spread of ``|Ẋ|`` around ``|c_F| p_P²/(2mħ)``;
    * balance: defect of the expanded condition
      ``(Ȧ - A/2t)² + A²β² = 2t(Ȧ - A/2t)(Ä - Ȧ/2t + A/2t²) + 2AȦtβ²``
      relative to its larger side, with ``β = p_P²/(2mħ)``.

    ``law`` defaults to ``A = c_F √t``, for which all three vanish.
    """
    pr = params or PhysicalParams()
    law = law or AmplitudeLaw.sqrt_law(c_f)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0):
        raise ZeroTime("amplitude law grid must be strictly positive")
    beta = p_rel ** 2 / (2.0 * pr.mass_m * pr.hbar)
    a, ad, add = law.value(t), law.first(t), law.second(t)
    g = ad - a / (2.0 * t)
    derivative = _ratio(g, a / (2.0 * t))
    speeds = field_speed(law, p_rel, t, pr)
    reference = abs(c_f) * beta
    scale = max(reference, float(speeds.max()))
    speed = float(np.max(np.abs(speeds - reference)) / scale) if scale > 0 else 0.0
    lhs = g ** 2 + (a * beta) ** 2
    rhs = 2.0 * t * g * (add - ad / (2.0 * t) + a / (2.0 * t ** 2)) + 2.0 * a * ad * t * beta ** 2
    balance = _ratio(lhs - rhs, np.maximum(np.abs(lhs), np.abs(rhs)))
    return AmplitudeLawReport(law.name, derivative, speed, balance, speeds)


# -- fields of the individual particles --------------------------------------------

def factorize(scn: EprScenario) -> tuple[StationaryField, StationaryField]:
    """Per-particle plane waves whose product follows the joint field.

    ``χ¹(x1) = c_F1 exp(i p x1/ħ)`` and ``χ²(x2) = c_F2 exp(-i p (x2 - x_0)/ħ)``
    with ``p = p_P/2``.
    """
    k = scn.p / scn.params.hbar
    c1, c2 = scn.particle_amplitudes
    chi1 = StationaryField(c1, 0.0, k, FieldKind.PLANE_WAVE_EXP)
    chi2 = StationaryField(c2, k * scn.offset, -k, FieldKind.PLANE_WAVE_EXP)
    return chi1, chi2


def pair_momenta(scn: EprScenario, general: bool = False) -> tuple[float, float]:
    """Discernible momenta of the two particles.

    With null particle fields these are the hidden momenta ``±p_P/2``. With
    ``general=True`` nonzero amplitudes are allowed and each momentum goes
    through the de Broglie relation of :mod:`pfield.momentum`.
    """
    c1, c2 = scn.particle_amplitudes
    p1, p2 = scn.p, -scn.p
    if c1 == 0 and c2 == 0:
        return p1, p2
    if not general:
        raise NonNullAmplitude(
            f"particle amplitudes {scn.particle_amplitudes!r} are nonzero; pass general=True")

    def discern(p_hidden, amp):
        mag = de_broglie_momentum(MomentumPrep(abs(p_hidden), abs(amp), params=scn.params))
        return math.copysign(mag, p_hidden)

    return discern(p1, c1), discern(p2, c2)


@dataclass(frozen=True)
class PairTracks:
    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    p1: float
    p2: float

    @property
    def relative(self) -> np.ndarray:
        return self.x1 - self.x2


def pair_tracks(scn: EprScenario, t) -> PairTracks:
    """Free trajectories ``x1 = (p/m)t + x1(0)``, ``x2 = -(p/m)t + x2(0)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("pair trajectories are defined for t >= 0")
    v = scn.p / scn.params.mass_m
    return PairTracks(t, v * t + scn.x1_0, -v * t + scn.x2_0, scn.p, -scn.p)


def relative_track(scn: EprScenario, t):
    """``x(t) = (p_P/m) t + x(0)``, obtained without the individual tracks."""
    return scn.relative_momentum / scn.params.mass_m * np.asarray(t, dtype=float) \
        + scn.relative_position_0


def predict_partner_position(x1_0: float, offset: float) -> float:
    return x1_0 + offset


def predict_partner_momentum(p1: float) -> float:
    return -p1


def particle_outputs(scn: EprScenario, particle: int, t: float,
                     remote_setting: str | None = None) -> dict:
    """Everything particle ``particle`` carries at time ``t``.

    ``remote_setting`` names what is being measured on the partner. It is
    accepted and ignored: local outputs never depend on it.
    """
    del remote_setting
    chi = factorize(scn)[particle - 1]
    tracks = pair_tracks(scn, t)
    p = pair_momenta(scn, general=True)[particle - 1]
    x = float(tracks.x1 if particle == 1 else tracks.x2)
    return {"field": chi, "position": x, "momentum": p}


@dataclass(frozen=True)
class FieldRepresentation:
    """One functional form of the joint field at ``t = 0``.

    ``form`` is ``"delta"`` (amplitude ``A(0)√(iħ/m)`` times a delta in
    ``x1 - x2 + x_0``) or ``"plane_wave"`` (amplitude ``c_F``).
    """

    form: str
    amplitude: complex

    @property
    def is_null(self) -> bool:
        return self.amplitude == 0


def null_field_representations(scn: EprScenario, amplitude_at_zero: float = 0.0
                               ) -> tuple[FieldRepresentation, FieldRepresentation]:
    pr = scn.params
    delta_amp = amplitude_at_zero * complex(np.sqrt(1j * pr.hbar / pr.mass_m))
    return (FieldRepresentation("delta", delta_amp),
            FieldRepresentation("plane_wave", complex(scn.field_constant)))


# -- ensembles -----------------------------------------------------------------------

@dataclass(frozen=True)
class Ensemble:
    relative_momentum: np.ndarray
    x1_0: np.ndarray
    offset: np.ndarray

    def __len__(self):
        return self.x1_0.size

    def scenario(self, i: int, params: PhysicalParams | None = None) -> EprScenario:
        return EprScenario(float(self.offset[i]), float(self.relative_momentum[i]),
                           float(self.x1_0[i]), params=params or PhysicalParams())


def sample_ensemble(n: int, seed: int, start: int = 0, p_range: float = 5.0,
                    x_range: float = 10.0, offset_range: tuple[float, float] = (0.5, 5.0)
                    ) -> Ensemble:
    """Draw hidden parameters for pairs ``start, ..., start + n - 1``.

    Draw ``i`` comes from a Philox generator keyed by ``seed`` with counter
    ``i``, so any partition of the index range across workers reproduces the
    serial result exactly. Positions are snapped to multiples of 2**-32 so
    that ``x1_0 + x_0`` and ``x2_0 - x1_0`` are exact in floating point.
    """
    out = np.empty((n, 3))
    for j in range(n):
        bg = np.random.Philox(key=seed, counter=[start + j, 0, 0, 0])
        out[j] = np.random.Generator(bg).random(3)
    lo, hi = offset_range
    return Ensemble(p_range * (2.0 * out[:, 0] - 1.0),
                    _dyadic(x_range * (2.0 * out[:, 1] - 1.0)),
                    _dyadic(lo + (hi - lo) * out[:, 2]))


def _dyadic(x):
    return np.round(np.ldexp(x, 32)) * 2.0 ** -32


# -- delta reconstructions -----------------------------------------------------------

def momentum_eigenfunctions(p: float, offset: float, params: PhysicalParams | None = None
                            ) -> tuple[Callable, Callable]:
    """``u_p(x1) = e^{i x1 p/ħ}/√(2πħ)`` and ``w_p(x2) = e^{-i (x2 - x_0) p/ħ}/√(2πħ)``."""
    hbar = (params or PhysicalParams()).hbar
    norm = 1.0 / math.sqrt(2.0 * math.pi * hbar)

    def u(x1):
        return norm * np.exp(1j * np.asarray(x1) * p / hbar)

    def w(x2):
        return norm * np.exp(-1j * (np.asarray(x2) - offset) * p / hbar)

    return u, w


def position_eigenfunctions(x: float, offset: float, sigma: float) -> tuple[Callable, Callable]:
    """Regularized ``v_x(x1) = δ(x - x1)`` and ``φ_x(x2) = δ(x - x2 + x_0)``."""
    d = NascentDelta(sigma)
    return (lambda x1: d(x - np.asarray(x1)),
            lambda x2: d(x - np.asarray(x2) + offset))


def reconstruct_delta_1d(x1, x2: float, offset: float, p_max: float, taper: float = 0.1,
                         params: PhysicalParams | None = None,
                         q: Quadrature = DEFAULT_QUADRATURE):
    """Band-limited ``δ(x1 - x2 + x_0)`` from the plane-wave expansion.

    ``(2πħ)⁻¹ ∫_{-p_max}^{p_max} dp w(p) exp(i p x1/ħ) exp(-i p (x2 - x_0)/ħ)``
    by adaptive quadrature, vectorized over ``x1``.
    """
    if not p_max > 0:
        raise ValueError("p_max must be positive")
    hbar = (params or PhysicalParams()).hbar
    arg = np.atleast_1d(np.asarray(x1, dtype=float)) - x2 + offset

    def integrand(p):
        return cosine_taper(p, p_max, taper)[:, None] * np.exp(1j * np.outer(p, arg) / hbar)

    out = integrate(integrand, -p_max, p_max, q) / (2.0 * math.pi * hbar)
    return out[0] if np.ndim(x1) == 0 else out


def reconstruct_delta_3d(r1, r2, r0, p_max: float, taper: float = 0.1,
                         params: PhysicalParams | None = None,
                         q: Quadrature = DEFAULT_QUADRATURE) -> complex:
    """Three-dimensional version: the product of one reconstruction per axis."""
    r1, r2, r0 = (np.asarray(v, dtype=float).reshape(3) for v in (r1, r2, r0))
    out = 1.0 + 0.0j
    for ax in range(3):
        out *= reconstruct_delta_1d(r1[ax], r2[ax], r0[ax], p_max, taper, params, q)
    return out


@dataclass(frozen=True)
class TestFunction:
    """Smooth test function with the interval outside which it is negligible."""

    func: Callable
    lo: float
    hi: float
    name: str = ""

    __test__ = False  # not a pytest class

    def __call__(self, x):
        return self.func(x)


def standard_test_functions(center: float = 0.0, width: float = 1.0) -> list[TestFunction]:
    """Gaussian, Gaussian times a linear ramp, and sech²; all of width ``width``."""
    c, s = center, width
    r_gauss = 9.0 * s
    r_sech = 40.0 * s
    return [
        TestFunction(lambda x: np.exp(-0.5 * ((x - c) / s) ** 2),
                     c - r_gauss, c + r_gauss, "gaussian"),
        TestFunction(lambda x: (x - c + 0.5 * s) / s * np.exp(-0.5 * ((x - c) / s) ** 2),
                     c - r_gauss, c + r_gauss, "gaussian_x"),
        TestFunction(lambda x: 1.0 / np.cosh((x - c) / s) ** 2,
                     c - r_sech, c + r_sech, "sech2"),
    ]


def weak_delta_momentum_route(f: TestFunction, x2: float, offset: float, p_max: float,
                              taper: float = 0.1, params: PhysicalParams | None = None,
                              q: Quadrature = DEFAULT_QUADRATURE) -> complex:
    """``∫ dx1 f(x1) ψ(x1, x2)`` with ``ψ`` from :func:`reconstruct_delta_1d`."""
    return integrate(lambda x1: f(x1) * reconstruct_delta_1d(x1, x2, offset, p_max, taper, params, q),
                     f.lo, f.hi, q)


def delta_position_route(x1, x2: float, offset: float, sigma: float,
                         q: Quadrature = DEFAULT_QUADRATURE):
    """``∫ dx v_x(x1) φ_x(x2)`` with nascent-delta position eigenfunctions."""
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    d = NascentDelta(sigma)
    c = x2 - offset
    r = d.support_radius

    def integrand(x):
        return d(x[:, None] - x1[None, :]) * d(x - c)[:, None]

    out = integrate(integrand, c - r, c + r, q)
    return out.real


def weak_delta_position_route(f: TestFunction, x2: float, offset: float, sigma: float,
                              q: Quadrature = DEFAULT_QUADRATURE) -> complex:
    """``∫ dx1 f(x1) ∫ dx v_x(x1) φ_x(x2)``; the integrand lives within ~13σ of ``x2 - x_0``."""
    c = x2 - offset
    r = 1.5 * NascentDelta(sigma).support_radius
    return integrate(lambda x1: f(x1) * delta_position_route(x1, x2, offset, sigma, q),
                     c - r, c + r, q)
