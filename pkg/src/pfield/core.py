"""Shared value types for particle-field (PF) systems.

A PF system is a particle joined to an energy-carrying field. Everything here
is an immutable value; the physics modules build and consume these.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import LedgerMismatch
from .numerics import finite_diff_2nd

# CODATA 2018
HBAR_SI = 1.054571817e-34
ELECTRON_MASS_SI = 9.1093837015e-31

LEDGER_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Particle mass and reduced Planck constant."""

    mass_m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.mass_m > 0 and self.hbar > 0):
            raise ValueError("mass_m and hbar must both be positive")
        if not (math.isfinite(self.mass_m) and math.isfinite(self.hbar)):
            raise ValueError("mass_m and hbar must be finite")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    @classmethod
    def natural(cls) -> PhysicalParams:
        return cls(1.0, 1.0)

    @classmethod
    def si_electron(cls) -> PhysicalParams:
        return cls(ELECTRON_MASS_SI, HBAR_SI)


def default_params() -> PhysicalParams:
    """Natural units unless ``PF_NATURAL_UNITS=0``, which selects SI electron values."""
    flag = os.environ.get("PF_NATURAL_UNITS", "1").strip()
    if flag == "0":
        return PhysicalParams.si_electron()
    if flag not in ("", "1"):
        raise ValueError(f"PF_NATURAL_UNITS must be 0 or 1, got {flag!r}")
    return PhysicalParams.natural()


@dataclass(frozen=True)
class EnergyLedger:
    """Energy bookkeeping of one PF system: E = K_P + K_F + V_F + V_ext.

    Construction fails with :class:`LedgerMismatch` when the components do not
    close on ``total`` to 1e-12 relative to :attr:`scale`, the largest term.
    Inside a barrier ``K_F`` and ``V_F`` can dwarf ``E`` and cancel, so the
    achievable closure is set by them rather than by ``E`` alone.
    """

    particle_kinetic: float
    field_kinetic: float
    field_potential: float
    external_potential: float
    total: float

    def __post_init__(self):
        if self.particle_kinetic < 0 or self.field_kinetic < 0:
            raise LedgerMismatch("kinetic energies must be non-negative")
        if abs(self.closure_residual) > LEDGER_RTOL * self.scale:
            raise LedgerMismatch(
                f"ledger does not close: residual {self.closure_residual:.3e} "
                f"for total {self.total!r}")

    @property
    def field_energy(self) -> float:
        return self.field_kinetic + self.field_potential

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.total), self.particle_kinetic, self.field_kinetic,
                   abs(self.field_potential), abs(self.external_potential))

    @property
    def closure_residual(self) -> float:
        return (self.particle_kinetic + self.field_kinetic + self.field_potential
                + self.external_potential - self.total)

    def as_dict(self) -> dict:
        return {
            "particle_kinetic": self.particle_kinetic,
            "field_kinetic": self.field_kinetic,
            "field_potential": self.field_potential,
            "external_potential": self.external_potential,
            "field_energy": self.field_energy,
            "total": self.total,
        }


class FieldKind(str, Enum):
    OSCILLATORY_COS = "oscillatory_cos"
    HYPERBOLIC_COSH = "hyperbolic_cosh"
    PLANE_WAVE_EXP = "plane_wave_exp"
    STANDING_SIN = "standing_sin"

    @property
    def temporal(self) -> bool:
        return self is FieldKind.STANDING_SIN


@dataclass(frozen=True)
class StationaryField:
    """Closed-form field descriptor.

    Evaluation rules by kind (``u`` is the coordinate):

    * ``oscillatory_cos``: ``R cos(k u + phase)``
    * ``hyperbolic_cosh``: ``R cosh(k u + phase)``
    * ``plane_wave_exp``: ``A exp(i (k u + phase))``
    * ``standing_sin``: ``A sin(k u + phase)`` with ``u`` a time; here ``k``
      is the angular frequency and ``phase`` holds the wavenumber times the
      particle position.
    """

    amplitude: float
    phase: float
    wavenumber: float
    kind: FieldKind

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")

    def __call__(self, u):
        return eval_field(self, u)


def eval_field(f: StationaryField, coordinate):
    arg = f.wavenumber * np.asarray(coordinate) + f.phase
    kind = f.kind
    if kind is FieldKind.OSCILLATORY_COS:
        out = f.amplitude * np.cos(arg)
    elif kind is FieldKind.HYPERBOLIC_COSH:
        out = f.amplitude * np.cosh(arg)
    elif kind is FieldKind.PLANE_WAVE_EXP:
        out = f.amplitude * np.exp(1j * arg)
    else:
        out = f.amplitude * np.sin(arg)
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ParticleState:
    """Bare-particle kinematics. ``momentum`` and ``kinetic`` follow from ``velocity``."""

    position: float
    velocity: float
    params: PhysicalParams = PhysicalParams()

    @property
    def momentum(self) -> float:
        return self.params.mass_m * self.velocity

    @property
    def kinetic(self) -> float:
        return self.momentum ** 2 / (2.0 * self.params.mass_m)

    def trajectory(self, t0: float = 0.0) -> Callable[[float], float]:
        """Free motion through ``position`` at ``t0``."""
        x0, v = self.position, self.velocity
        return lambda t: x0 + v * (t - t0)


def oscillator_residual(f: StationaryField, trajectory: Callable[[float], float] | None,
                        omega: float, sign: int, t: float, h: float | None = None) -> float:
    """Normalized defect of ``d²χ(x(t))/dt² = -sign·ω²·χ`` at time ``t``.

    ``sign=+1`` is the restoring (oscillatory) law, ``sign=-1`` the
    anti-restoring law obeyed inside a barrier. The defect is divided by
    ``ω²·|amplitude|``. Temporal fields ignore ``trajectory``.

    The default step is ``1e-3 / ω``, where the central difference error
    (``(hω)²/12``) sits well below 1e-5 and round-off is negligible.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not omega > 0:
        raise ValueError("omega must be positive")
    if f.amplitude == 0:
        return 0.0
    if h is None:
        h = 1e-3 / omega
    if f.kind.temporal or trajectory is None:
        g = f
    else:
        def g(s):
            return f(trajectory(s))
    lhs = finite_diff_2nd(g, t, h)
    rhs = -sign * omega ** 2 * g(t)
    return abs(lhs - rhs) / (omega ** 2 * abs(f.amplitude))
