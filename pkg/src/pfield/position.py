"""Position measurement in a narrow slit.

Inside a slit ``a <= x <= a + δa`` the PF position is

    q = (x - a) + δa · F(x),
    F(x) = (1/nπ) Σ_j (-1)^(j+1) b_j sin(2 j k_n (x - a)),   k_n = nπ/δa,

so ``q → x - a`` as the slit narrows and the field amplitude collapses: the
particle unfolds. The series coefficients ``b_j`` are inputs (default ``[1]``);
they are supplied as magnitudes and the alternating signs are applied here.

There is deliberately no inverse of :func:`pf_position`: once the particle is
found in the slit, the PF position before measurement cannot be recovered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FieldKind, PhysicalParams, StationaryField
from .errors import OutOfSlit
from .momentum import normalize_density
from .numerics import integrate_samples


@dataclass(frozen=True)
class SlitSpec:
    slit_left: float
    slit_width: float
    mode_index: int = 1
    series_coefficients: tuple[float, ...] = (1.0,)
    truncation_order: int | None = None
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        if not self.slit_width > 0:
            raise ValueError("slit width must be positive")
        if int(self.mode_index) != self.mode_index or self.mode_index < 1:
            raise ValueError("mode index must be a positive integer")
        b = tuple(float(c) for c in self.series_coefficients)
        object.__setattr__(self, "series_coefficients", b)
        n_terms = len(b) if self.truncation_order is None else self.truncation_order
        if n_terms < 1:
            raise ValueError("truncation order must be at least 1")
        object.__setattr__(self, "truncation_order", int(n_terms))

    @property
    def mode_wavenumber(self) -> float:
        return self.mode_index * math.pi / self.slit_width

    @property
    def coefficients(self) -> np.ndarray:
        """First ``truncation_order`` coefficients, zero-padded."""
        b = np.zeros(self.truncation_order)
        n = min(self.truncation_order, len(self.series_coefficients))
        b[:n] = self.series_coefficients[:n]
        return b

    def shift_bound(self) -> float:
        """Upper bound on ``|q - (x - a)|``: ``δa Σ|b_j| / (nπ)``."""
        return self.slit_width * float(np.abs(self.coefficients).sum()) / (self.mode_index * math.pi)


def _check_inside(spec: SlitSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    lo, hi = spec.slit_left, spec.slit_left + spec.slit_width
    if np.any((x < lo) | (x > hi)):
        raise OutOfSlit(f"x must lie in [{lo!r}, {hi!r}]")
    return x


def f_series(spec: SlitSpec, x):
    x = _check_inside(spec, x)
    b = spec.coefficients
    j = np.arange(1, b.size + 1)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    u = np.multiply.outer(x - spec.slit_left, 2.0 * j * spec.mode_wavenumber)
    out = (np.sin(u) @ (signs * b)) / (spec.mode_index * math.pi)
    return out[()] if np.ndim(out) == 0 else out


def pf_position(spec: SlitSpec, x):
    """PF position measured from the slit edge, ``(x - a) + δa·F(x)``."""
    x = _check_inside(spec, x)
    return (x - spec.slit_left) + spec.slit_width * f_series(spec, x)


def slit_wavenumber(params: PhysicalParams, energy: float) -> float:
    """``k = √(2mE)/ħ``."""
    return math.sqrt(2.0 * params.mass_m * energy) / params.hbar


@dataclass(frozen=True)
class SlitField:
    """Field of the PF system while it sits in the slit."""

    amplitude: float
    angular_frequency: float
    wavenumber: float
    particle_position: float

    @classmethod
    def from_velocity(cls, amplitude: float, wavenumber: float, v_p: float,
                      particle_position: float) -> SlitField:
        return cls(amplitude, wavenumber * v_p, wavenumber, particle_position)

    def as_stationary(self) -> StationaryField:
        return StationaryField(self.amplitude, self.wavenumber * self.particle_position,
                               self.angular_frequency, FieldKind.STANDING_SIN)


def slit_field_eval(f: SlitField, t):
    """``χ(t) = A0 sin(ω̄t + k x0)``."""
    return f.amplitude * np.sin(f.angular_frequency * np.asarray(t) + f.wavenumber * f.particle_position)


@dataclass(frozen=True)
class UnfoldingReport:
    field_energy: float
    particle_energy: float

    @property
    def field_fraction(self) -> float:
        return self.field_energy / self.particle_energy if self.particle_energy else math.inf

    def released_to_particle(self, field_energy_before: float) -> float:
        """Energy handed from field to particle when the field collapses.

        A bookkeeping difference between the two ledgers; no dynamics implied.
        """
        return field_energy_before - self.field_energy

    def as_dict(self) -> dict:
        return {"field_energy": self.field_energy, "particle_energy": self.particle_energy,
                "field_fraction": self.field_fraction}


def unfolding_energy(spec: SlitSpec, amplitude: float, v_p: float,
                     omega_bar: float | None = None) -> UnfoldingReport:
    """Field energy ``½mω̄²A0²`` against the particle's ``½mv_P²``.

    ``omega_bar`` defaults to ``k_n v_P`` for the slit's mode wavenumber.
    """
    m = spec.params.mass_m
    if omega_bar is None:
        omega_bar = spec.mode_wavenumber * abs(v_p)
    return UnfoldingReport(0.5 * m * omega_bar ** 2 * amplitude ** 2, 0.5 * m * v_p ** 2)


def mean_position(psi, x_grid) -> float:
    """``⟨x0⟩ = ∫ x0 |Ψ(x0)|² dx0`` from samples, normalizing ``|Ψ|²`` first."""
    x = np.asarray(x_grid, dtype=float)
    psi, _ = normalize_density(psi, x)
    return float(integrate_samples(x * np.abs(psi) ** 2, x).real)
