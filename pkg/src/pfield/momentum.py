"""Momentum measurement: preparing a free momentum eigenfield.

Once the particle is released from every force at ``t0`` its field becomes the
plane wave ``A_p exp(ikx)`` with ``k = p/ħ``. The discernible (de Broglie)
momentum ``p`` then exceeds the hidden particle momentum ``p_P`` whenever the
field amplitude ``A_p`` is nonzero:

    p = p_P (1 - p_P² A_p² / ħ²)^(-1/2)

which requires ``p_P² A_p² < ħ²``. The wavenumber inside the field-velocity
relation is read as ``p/ħ`` itself, making that relation and the closed form
above the same fixed point.

The module also expands an arbitrary sampled field in plane-wave eigenfields
sharing one common amplitude ``A_p``, and takes momentum means over the
resulting density.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .core import FieldKind, PhysicalParams, StationaryField
from .errors import (AmplitudeTooLarge, InsufficientSamples, NonDecaying,
                     NotNormalizable, TimeBeforePreparation)
from .numerics import DEFAULT_QUADRATURE, Quadrature, integrate_samples

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentumPrep:
    """Hidden parameters of a prepared momentum eigenstate."""

    particle_momentum: float
    field_amplitude: float
    release_time: float = 0.0
    particle_position_at_t0: float = 0.0
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        if self.field_amplitude < 0:
            raise ValueError("field amplitude A_p is non-negative by convention")

    @property
    def coupling(self) -> float:
        """``p_P² A_p² / ħ²``, which must stay below one."""
        return (self.particle_momentum * self.field_amplitude / self.params.hbar) ** 2

    def _contraction(self) -> float:
        c = self.coupling
        if not c < 1.0:
            raise AmplitudeTooLarge(
                f"p_P^2 A_p^2 / hbar^2 = {c!r} must be < 1 "
                f"(p_P={self.particle_momentum!r}, A_p={self.field_amplitude!r})")
        return math.sqrt(1.0 - c)


@dataclass(frozen=True)
class MomentumRecord:
    de_broglie_p: float
    wavelength: float
    field_energy: float
    pf_velocity: float
    pf_position_at_t0: float

    def as_dict(self) -> dict:
        return {
            "de_broglie_p": self.de_broglie_p,
            "wavelength": self.wavelength,
            "field_energy": self.field_energy,
            "pf_velocity": self.pf_velocity,
            "pf_position_at_t0": self.pf_position_at_t0,
        }


def de_broglie_momentum(prep: MomentumPrep) -> float:
    return prep.particle_momentum / prep._contraction()


def wavelength(prep: MomentumPrep) -> float:
    """``λ = (h/p_P)·√(1 - p_P²A_p²/ħ²)``; equals ``h/p``."""
    s = prep._contraction()
    return prep.params.h / prep.particle_momentum * s


def field_velocity_relation(prep: MomentumPrep) -> float:
    """``v_P (1 + k²A_p²)^½`` with ``k = p/ħ``.

    Independent route to ``p/m``, used to check the closed form.
    """
    k = de_broglie_momentum(prep) / prep.params.hbar
    v_p = prep.particle_momentum / prep.params.mass_m
    return v_p * math.sqrt(1.0 + (k * prep.field_amplitude) ** 2)


def field_energy(prep: MomentumPrep) -> float:
    """Field kinetic energy ``(p_P²/2m) k² A_p²``; the field potential is zero."""
    k = de_broglie_momentum(prep) / prep.params.hbar
    return prep.particle_momentum ** 2 / (2.0 * prep.params.mass_m) * (k * prep.field_amplitude) ** 2


def pf_velocity(prep: MomentumPrep) -> float:
    return de_broglie_momentum(prep) / prep.params.mass_m


def pf_position_at_t0(prep: MomentumPrep) -> float:
    return prep.particle_position_at_t0 / prep._contraction()


def pf_trajectory(prep: MomentumPrep, t):
    """PF position ``q(t) = (p/m)(t - t0) + q0`` for ``t >= t0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < prep.release_time):
        raise TimeBeforePreparation(
            f"trajectory defined for t >= t0 = {prep.release_time!r}")
    q = pf_velocity(prep) * (t - prep.release_time) + pf_position_at_t0(prep)
    return q[()] if q.ndim == 0 else q


def recover_initial_position(prep: MomentumPrep, t: float, q: float) -> float:
    """Invert the trajectory: the PF position at ``t0`` given ``q`` at ``t``.

    Possible because the preparation is reversible.
    """
    return q - pf_velocity(prep) * (t - prep.release_time)


def recover_particle_position(prep: MomentumPrep, q0: float) -> float:
    return q0 * prep._contraction()


def measure_momentum(prep: MomentumPrep) -> MomentumRecord:
    return MomentumRecord(
        de_broglie_p=de_broglie_momentum(prep),
        wavelength=wavelength(prep),
        field_energy=field_energy(prep),
        pf_velocity=pf_velocity(prep),
        pf_position_at_t0=pf_position_at_t0(prep),
    )


def eigenfield(prep: MomentumPrep) -> StationaryField:
    """The prepared plane wave ``A_p exp(i p x/ħ)``."""
    k = de_broglie_momentum(prep) / prep.params.hbar
    return StationaryField(prep.field_amplitude, 0.0, k, FieldKind.PLANE_WAVE_EXP)


def field_force(f_p: float, v_p: float, chi_prime_abs: Callable[[float], float], x: float,
                params: PhysicalParams | None = None, h: float = 1e-5) -> float:
    """Force on the field, ``m v_P² d|χ'|/dx + f_P |χ'|``.

    ``d|χ'|/dx`` is a central difference with step ``h``.
    """
    m = (params or PhysicalParams()).mass_m
    slope = (chi_prime_abs(x + h) - chi_prime_abs(x - h)) / (2.0 * h)
    return m * v_p ** 2 * slope + f_p * chi_prime_abs(x)


@dataclass(frozen=True)
class FieldSnapshot:
    """Complex field samples on a strictly increasing grid at one time."""

    x: np.ndarray
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("x and values must be 1-D arrays of equal length")
        if x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("snapshot grid must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func: Callable, x, time: float = 0.0) -> FieldSnapshot:
        x = np.asarray(x, dtype=float)
        return cls(x, np.asarray(func(x), dtype=complex), time)

    def interpolate(self, xq):
        re = CubicSpline(self.x, self.values.real)
        im = CubicSpline(self.x, self.values.imag)
        return re(xq) + 1j * im(xq)


def newton_field_residual(snapshots: Sequence[FieldSnapshot], trajectory: Callable[[float], float],
                          f_nc: Callable[[float], float] | None = None,
                          params: PhysicalParams | None = None) -> float:
    """Defect of ``m d|Ẋ|/dt = f_nc`` along a particle path.

    ``Ẋ`` is the total time derivative of the field seen by the particle,
    ``(∂X/∂x) v_P + ∂X/∂t``. It is formed by sampling each snapshot at the
    particle position and differencing in time (midpoint rule), then
    differencing ``|Ẋ|`` once more. The result is
    ``max|m d|Ẋ|/dt - f_nc| · T / (m max|Ẋ|)`` with ``T`` the time span: the
    relative drift of ``|Ẋ|`` across the window, zero when ``|Ẋ|`` vanishes.
    """
    if len(snapshots) < 3:
        raise InsufficientSamples("need at least 3 snapshots")
    m = (params or PhysicalParams()).mass_m
    snaps = sorted(snapshots, key=lambda s: s.time)
    t = np.array([s.time for s in snaps])
    if np.any(np.diff(t) <= 0):
        raise InsufficientSamples("snapshot times must be distinct")
    along = np.array([s.interpolate(trajectory(s.time)) for s in snaps])
    xdot = np.abs(np.diff(along) / np.diff(t))
    t_mid = 0.5 * (t[1:] + t[:-1])
    dxdot = np.diff(xdot) / np.diff(t_mid)
    t_mid2 = 0.5 * (t_mid[1:] + t_mid[:-1])
    force = np.zeros_like(t_mid2) if f_nc is None else np.array([f_nc(s) for s in t_mid2])
    scale = m * float(xdot.max())
    if scale == 0.0:
        # null field: the law holds only if no force acts
        return math.inf if np.any(force) else 0.0
    return float(np.max(np.abs(m * dxdot - force)) * (t[-1] - t[0]) / scale)


def expand_field(snapshot: FieldSnapshot, common_amplitude: float, p_grid,
                 params: PhysicalParams | None = None,
                 q: Quadrature = DEFAULT_QUADRATURE) -> np.ndarray:
    """Coefficients ``φ(p)`` of ``X`` in eigenfields ``A_p exp(ipx/ħ)``.

    ``φ(p) = (2πħA_p²)⁻¹ ∫ dx A_p exp(-ipx/ħ) X(x)``, the inverse of
    ``X(x) = ∫ dp A_p exp(ipx/ħ) φ(p)`` given orthogonality
    ``∫ χ_p* χ_p' dx = 2πħA_p² δ(p - p')``. Integration is the trapezoid rule
    on the snapshot grid, which is spectrally accurate once the field has
    decayed at both edges.

    Raises
    ------
    NonDecaying
        If either edge sample exceeds ``max(abs_tol, rel_tol * max|X|)``.
    """
    if not common_amplitude > 0:
        raise ValueError("common amplitude A_p must be positive")
    hbar = (params or PhysicalParams()).hbar
    xv, X = snapshot.x, snapshot.values
    peak = float(np.max(np.abs(X)))
    edge_tol = max(q.absolute_tolerance, q.relative_tolerance * peak)
    if max(abs(X[0]), abs(X[-1])) > edge_tol:
        raise NonDecaying(
            f"field edges {abs(X[0]):.3e}, {abs(X[-1]):.3e} exceed {edge_tol:.3e}")
    p = np.atleast_1d(np.asarray(p_grid, dtype=float))
    kernel = np.exp(-1j * np.outer(p, xv) / hbar)
    coeff = integrate_samples(kernel * X[None, :], xv)
    return coeff / (2.0 * math.pi * hbar * common_amplitude)


def synthesize_field(phi, p_grid, common_amplitude: float, x,
                     params: PhysicalParams | None = None) -> np.ndarray:
    """``X(x) = ∫ dp A_p exp(ipx/ħ) φ(p)`` on the sampled momentum grid."""
    hbar = (params or PhysicalParams()).hbar
    p = np.asarray(p_grid, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    kernel = np.exp(1j * np.outer(x, p) / hbar)
    return common_amplitude * integrate_samples(kernel * np.asarray(phi)[None, :], p)


def normalize_density(phi, grid) -> tuple[np.ndarray, float]:
    """Rescale amplitudes so ``∫|φ|² = 1``; returns ``(φ_normalized, norm)``.

    ``norm`` is the original ``∫|φ|²``.
    """
    phi = np.asarray(phi)
    norm = float(integrate_samples(np.abs(phi) ** 2, np.asarray(grid, dtype=float)).real)
    if not norm > 0:
        raise NotNormalizable("density integrates to zero")
    if abs(norm - 1.0) > 1e-6:
        log.info("renormalizing density by factor %.17g", norm)
    return phi / math.sqrt(norm), norm


def mean_momentum(phi, p_grid) -> float:
    """``⟨p⟩ = ∫ p |φ(p)|² dp`` after normalizing ``|φ|²``."""
    p = np.asarray(p_grid, dtype=float)
    phi, _ = normalize_density(phi, p)
    return float(integrate_samples(p * np.abs(phi) ** 2, p).real)


def ensemble_mean_momentum(preps: Sequence[MomentumPrep], weights) -> float:
    """Weighted average of the discernible momenta of an ensemble of preparations."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(preps),) or not w.sum() > 0:
        raise NotNormalizable("need one positive weight per preparation")
    p = np.array([de_broglie_momentum(pr) for pr in preps])
    return float(np.dot(w, p) / w.sum())
