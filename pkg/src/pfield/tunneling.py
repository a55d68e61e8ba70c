"""Energy exchange between particle and field at a rectangular barrier.

Region I (x < 0) carries the oscillatory field ``R_I cos(kx + ϑ_I)`` and
region II (0 <= x <= a) the hyperbolic field ``R_II cosh(κx + ϑ_II)``. In each
region the particle's kinetic energy ``K_P`` is a free hidden parameter; the
field amplitude is whatever closes the energy ledger on the total energy E.
Inside the barrier the field energy is negative, which lowers the effective
potential the PF system sees below ``V0``.

No matching conditions connect the two regions: nothing in the model fixes how
``K_P`` in region I relates to ``K_P`` in region II for the same particle, so
the two regions are independent one-parameter families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .core import EnergyLedger, FieldKind, PhysicalParams, StationaryField
from .errors import DomainError, InvalidRegime, RegionMismatch


class Region(str, Enum):
    I = "I"
    II = "II"


@dataclass(frozen=True)
class BarrierSpec:
    total_energy: float
    barrier_height: float
    barrier_width: float = 1.0
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        E, V0 = self.total_energy, self.barrier_height
        if not (0.0 < E < V0):
            raise InvalidRegime(f"tunneling needs 0 < E < V0, got E={E!r}, V0={V0!r}")
        if not self.barrier_width > 0:
            raise DomainError("barrier width must be positive")


def wavenumbers(spec: BarrierSpec) -> tuple[float, float]:
    """``(k, κ)`` with ``k = √(2mE)/ħ`` and ``κ = √(2m(V0 - E))/ħ``."""
    m, hbar = spec.params.mass_m, spec.params.hbar
    E, V0 = spec.total_energy, spec.barrier_height
    if not (0.0 < E < V0):
        raise InvalidRegime(f"tunneling needs 0 < E < V0, got E={E!r}, V0={V0!r}")
    return math.sqrt(2.0 * m * E) / hbar, math.sqrt(2.0 * m * (V0 - E)) / hbar


def _momentum(params: PhysicalParams, kinetic: float) -> float:
    return math.sqrt(2.0 * params.mass_m * kinetic)


def region1_amplitude(spec: BarrierSpec, kp1: float, negative_root: bool = False) -> float:
    """Field amplitude before the barrier for particle kinetic energy ``kp1``.

    ``R_I = (ħ/p_P)·√(1 - K_P/E)``; vanishes when the particle carries all
    the energy.
    """
    E = spec.total_energy
    if not 0.0 < kp1 <= E:
        raise DomainError(f"region I needs 0 < K_P <= E, got K_P={kp1!r}, E={E!r}")
    r = spec.params.hbar / _momentum(spec.params, kp1) * math.sqrt(1.0 - kp1 / E)
    return -r if negative_root else r


def region2_amplitude(spec: BarrierSpec, kp2: float, negative_root: bool = False) -> float:
    """Field amplitude inside the barrier: ``R_II = (ħ/p_P)·√(1 + K_P/(V0 - E))``.

    Tends to ``1/κ`` from above as ``kp2`` grows without bound and never
    approaches zero.
    """
    E, V0 = spec.total_energy, spec.barrier_height
    if not E < V0:
        raise InvalidRegime("region II amplitude needs E < V0")
    if not kp2 > 0:
        raise DomainError(f"region II needs K_P > 0, got {kp2!r}")
    r = spec.params.hbar / _momentum(spec.params, kp2) * math.sqrt(1.0 + kp2 / (V0 - E))
    return -r if negative_root else r


@dataclass(frozen=True)
class RegionState:
    """Field and particle data in one region.

    The amplitude is stored as given, so a deliberately perturbed state can be
    built to probe the consistency checks; :meth:`satisfies_inequality` reports
    whether the region's ``p_P²R² ≶ ħ²`` bound holds.
    """

    region: Region
    wavenumber: float
    amplitude: float
    phase: float
    particle_kinetic: float
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        object.__setattr__(self, "region", Region(self.region))

    @property
    def particle_momentum(self) -> float:
        return _momentum(self.params, self.particle_kinetic)

    @property
    def particle_velocity(self) -> float:
        return self.particle_momentum / self.params.mass_m

    @property
    def omega(self) -> float:
        """Temporal frequency ``v_P·k`` (or ``v_P·κ``) of the field along the path."""
        return self.particle_velocity * self.wavenumber

    @property
    def pr_over_hbar_sq(self) -> float:
        return (self.particle_momentum * self.amplitude / self.params.hbar) ** 2

    def satisfies_inequality(self) -> bool:
        if self.region is Region.I:
            return self.pr_over_hbar_sq < 1.0
        return self.pr_over_hbar_sq > 1.0

    def field(self) -> StationaryField:
        kind = FieldKind.OSCILLATORY_COS if self.region is Region.I else FieldKind.HYPERBOLIC_COSH
        return StationaryField(self.amplitude, self.phase, self.wavenumber, kind)

    def field_energy(self) -> float:
        """``K_P k² R²`` in region I, ``-K_P κ² R²`` in region II."""
        mag = self.particle_kinetic * (self.wavenumber * self.amplitude) ** 2
        return mag if self.region is Region.I else -mag


def region1_state(spec: BarrierSpec, kp1: float, phase: float = 0.0,
                  negative_root: bool = False) -> RegionState:
    k, _ = wavenumbers(spec)
    return RegionState(Region.I, k, region1_amplitude(spec, kp1, negative_root),
                       phase, kp1, spec.params)


def region2_state(spec: BarrierSpec, kp2: float, phase: float = 0.0,
                  negative_root: bool = False) -> RegionState:
    _, kappa = wavenumbers(spec)
    return RegionState(Region.II, kappa, region2_amplitude(spec, kp2, negative_root),
                       phase, kp2, spec.params)


def energy_ledger(spec: BarrierSpec, state: RegionState, x: float) -> EnergyLedger:
    """Position-resolved ledger: field kinetic and potential energies trade off in x.

    Region I: ``K_F = ½mω²R²sin²(kx+ϑ)``, ``V_F = ½mω²R²cos²(kx+ϑ)``.
    Region II: ``K_F = ½mω²R²sinh²(κx+ϑ)``, ``V_F = -½mω²R²cosh²(κx+ϑ)``
    and the barrier adds ``V_ext = V0``.
    """
    half_m_w2_r2 = 0.5 * state.params.mass_m * (state.omega * state.amplitude) ** 2
    u = state.wavenumber * x + state.phase
    if state.region is Region.I:
        if not x < 0:
            raise RegionMismatch(f"region I needs x < 0, got {x!r}")
        kf = half_m_w2_r2 * math.sin(u) ** 2
        vf = half_m_w2_r2 * math.cos(u) ** 2
        vext = 0.0
    else:
        if not 0.0 <= x <= spec.barrier_width:
            raise RegionMismatch(
                f"region II needs 0 <= x <= {spec.barrier_width!r}, got {x!r}")
        kf = half_m_w2_r2 * math.sinh(u) ** 2
        vf = -half_m_w2_r2 * math.cosh(u) ** 2
        vext = spec.barrier_height
    return EnergyLedger(state.particle_kinetic, kf, vf, vext, spec.total_energy)


def total_energy(spec: BarrierSpec, state: RegionState) -> float:
    """``K_P(1 + k²R²)`` in region I or ``K_P(1 - κ²R²) + V0`` in region II."""
    kp = state.particle_kinetic
    kr2 = (state.wavenumber * state.amplitude) ** 2
    if state.region is Region.I:
        return kp * (1.0 + kr2)
    return kp * (1.0 - kr2) + spec.barrier_height


def effective_kinetic(spec: BarrierSpec, state: RegionState) -> float:
    """Kinetic energy in the standard-QM sense, ``K_P / (1 - p_P²R²/ħ²)``.

    Equals ``E - V0`` (negative) for a state that closes the barrier ledger.
    """
    if state.region is not Region.II:
        raise RegionMismatch("effective kinetic energy is defined inside the barrier")
    return state.particle_kinetic / (1.0 - state.pr_over_hbar_sq)


def total_energy_consistency(spec: BarrierSpec, state_1: RegionState,
                             state_2: RegionState) -> float:
    """Relative disagreement between the region-I and region-II totals."""
    if state_1.region is not Region.I or state_2.region is not Region.II:
        raise RegionMismatch("expected one region-I and one region-II state")
    return abs(total_energy(spec, state_1) - total_energy(spec, state_2)) / spec.total_energy


def qm_transmission_reference(spec: BarrierSpec) -> float:
    """Textbook rectangular-barrier transmission probability.

    Provided only as an external cross-reference: the PF model itself makes no
    transmission prediction.
    """
    E, V0, a = spec.total_energy, spec.barrier_height, spec.barrier_width
    _, kappa = wavenumbers(spec)
    return 1.0 / (1.0 + V0 ** 2 * math.sinh(kappa * a) ** 2 / (4.0 * E * (V0 - E)))
