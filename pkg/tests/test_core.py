import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfield.core import (
    EnergyLedger,
    FieldKind,
    ParticleState,
    PhysicalParams,
    StationaryField,
    default_params,
    eval_field,
    oscillator_residual,
)
from pfield.errors import LedgerMismatch


class TestParams:
    def test_natural_default(self, monkeypatch):
        monkeypatch.delenv("PF_NATURAL_UNITS", raising=False)
        assert default_params() == PhysicalParams(1.0, 1.0)

    def test_si_toggle(self, monkeypatch):
        monkeypatch.setenv("PF_NATURAL_UNITS", "0")
        p = default_params()
        assert p == PhysicalParams.si_electron()
        assert p.hbar == pytest.approx(1.054571817e-34)

    def test_bad_toggle(self, monkeypatch):
        monkeypatch.setenv("PF_NATURAL_UNITS", "yes")
        with pytest.raises(ValueError):
            default_params()

    def test_planck_constant(self):
        assert PhysicalParams(hbar=2.0).h == pytest.approx(4 * math.pi)

    @pytest.mark.parametrize("m, hbar", [(0.0, 1.0), (1.0, -1.0), (math.nan, 1.0)])
    def test_invalid(self, m, hbar):
        with pytest.raises(ValueError):
            PhysicalParams(m, hbar)


class TestLedger:
    def test_closure(self):
        led = EnergyLedger(1.0, 0.0, -2.0, 2.0, 1.0)
        assert led.field_energy == -2.0
        assert led.closure_residual == 0.0

    def test_mismatch_raises(self):
        with pytest.raises(LedgerMismatch):
            EnergyLedger(1.0, 0.0, -2.0, 2.0, 1.1)

    def test_negative_kinetic_rejected(self):
        with pytest.raises(LedgerMismatch):
            EnergyLedger(-1.0, 0.0, 0.0, 0.0, -1.0)

    def test_as_dict_keys(self):
        d = EnergyLedger(0.5, 0.25, 0.25, 0.0, 1.0).as_dict()
        assert d["field_energy"] == 0.5
        assert d["total"] == 1.0


class TestEvalField:
    def test_cos_origin(self):
        assert eval_field(StationaryField(1.0, 0.0, 1.0, FieldKind.OSCILLATORY_COS), 0.0) == 1.0

    def test_cosh_origin(self):
        assert eval_field(StationaryField(1.0, 0.0, 1.0, FieldKind.HYPERBOLIC_COSH), 0.0) == 1.0

    def test_plane_wave(self):
        v = eval_field(StationaryField(2.0, 0.0, 3.0, FieldKind.PLANE_WAVE_EXP), math.pi / 6)
        assert v == pytest.approx(2j, abs=1e-15)

    @given(st.floats(-1e3, 1e3), st.floats(-10, 10), st.floats(-10, 10))
    def test_deterministic_and_finite(self, x, amp, k):
        for kind in (FieldKind.OSCILLATORY_COS, FieldKind.PLANE_WAVE_EXP, FieldKind.STANDING_SIN):
            f = StationaryField(amp, 0.3, k, kind)
            a, b = eval_field(f, x), eval_field(f, x)
            assert a == b and np.isfinite(a)

    def test_callable_matches_eval(self):
        f = StationaryField(1.5, 0.2, 0.7, FieldKind.OSCILLATORY_COS)
        x = np.linspace(-3, 3, 7)
        np.testing.assert_array_equal(f(x), eval_field(f, x))


class TestOscillatorResidual:
    def setup_method(self):
        self.particle = ParticleState(0.2, 1.5)
        self.k = 2.0
        self.omega = self.particle.velocity * self.k

    def test_cos_attractive(self):
        f = StationaryField(0.8, 0.1, self.k, FieldKind.OSCILLATORY_COS)
        r = oscillator_residual(f, self.particle.trajectory(), self.omega, +1, 0.7)
        assert r < 1e-5

    def test_cosh_repulsive(self):
        f = StationaryField(0.8, 0.1, self.k, FieldKind.HYPERBOLIC_COSH)
        r = oscillator_residual(f, self.particle.trajectory(), self.omega, -1, 0.3)
        assert r < 1e-5

    def test_mismatched_frequency(self):
        f = StationaryField(0.8, 0.0, self.k, FieldKind.OSCILLATORY_COS)
        r = oscillator_residual(f, self.particle.trajectory(), 2 * self.omega, +1, 0.0)
        assert r > 0.1

    def test_second_order_in_step(self):
        f = StationaryField(1.0, 0.3, self.k, FieldKind.OSCILLATORY_COS)
        tr = self.particle.trajectory()
        r1 = oscillator_residual(f, tr, self.omega, +1, 0.4, h=4e-2)
        r2 = oscillator_residual(f, tr, self.omega, +1, 0.4, h=2e-2)
        assert 3.5 <= r1 / r2 <= 4.5

    def test_temporal_field_ignores_trajectory(self):
        f = StationaryField(1.0, 0.5, 3.0, FieldKind.STANDING_SIN)
        assert oscillator_residual(f, None, 3.0, +1, 0.2) < 1e-5


def test_particle_state_kinetic():
    s = ParticleState(0.0, 2.0, PhysicalParams(3.0))
    assert s.momentum == 6.0
    assert s.kinetic == 6.0
    assert s.trajectory(1.0)(3.0) == 4.0
