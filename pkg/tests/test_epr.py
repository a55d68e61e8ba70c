import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from pfield import epr
from pfield.core import PhysicalParams
from pfield.errors import NegativeTime, NonNullAmplitude, ZeroTime
from pfield.numerics import Quadrature

Q = Quadrature(1e-12, 1e-11)


class TestPropagator:
    @given(st.floats(-20, 20), st.floats(0.01, 10))
    def test_modulus(self, x, t):
        k = epr.free_propagator(x, t, 0.3)
        assert abs(k) ** 2 == pytest.approx(1.0 / t, rel=1e-12)

    def test_phase_at_source(self):
        assert cmath.phase(epr.free_propagator(0.5, 2.0, 0.5)) == pytest.approx(-math.pi / 4)

    def test_phase_worked(self):
        ph = cmath.phase(epr.free_propagator(2.0, 1.0, 0.0))
        assert ph == pytest.approx(-math.pi / 4 + 2.0, abs=1e-14)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_non_positive_time(self, t):
        with pytest.raises(ZeroTime):
            epr.free_propagator(0.0, t, 0.0)


class TestEvolution:
    scn = epr.EprScenario(offset=1.0, relative_momentum=2.0)
    xs = np.linspace(-3, 3, 31)

    def test_plane_wave_character(self):
        mod, phase = epr.propagation_deviation(self.scn, self.xs, 1.0, 1e-3, Q)
        assert mod < 1e-4
        assert phase < 1e-3

    def test_converges_as_width_shrinks(self):
        devs = [epr.propagation_deviation(self.scn, self.xs, 1.0, s, Q)[0] for s in (1e-1, 5e-2, 2.5e-2)]
        assert devs[0] > devs[1] > devs[2]

    def test_against_scipy_convolution(self):
        x, t, s = 0.7, 1.0, 0.05
        d = lambda y: math.exp(-0.5 * ((y + 1.0) / s) ** 2) / (s * math.sqrt(2 * math.pi))  # noqa: E731
        re = sp_integrate.quad(lambda y: (epr.free_propagator(x, t, y) * d(y)).real, -1 - 9 * s, -1 + 9 * s,
                               epsabs=1e-13, epsrel=1e-12)[0]
        im = sp_integrate.quad(lambda y: (epr.free_propagator(x, t, y) * d(y)).imag, -1 - 9 * s, -1 + 9 * s,
                               epsabs=1e-13, epsrel=1e-12)[0]
        ours = epr.evolve_delta(self.scn, x, t, s, Q)
        assert abs(ours - complex(re, im)) < 1e-9


class TestJointField:
    def test_null(self):
        scn = epr.EprScenario(1.0, 2.0, field_constant=0.0)
        assert np.all(epr.joint_field(scn, np.linspace(-3, 3, 7), 0.0) == 0)

    @given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-3, 3))
    def test_modulus(self, x, x0, c):
        scn = epr.EprScenario(1.0, 2.0, field_constant=c)
        assert abs(epr.joint_field(scn, x, x0)) == pytest.approx(abs(c), rel=1e-12)

    def test_worked(self):
        scn = epr.EprScenario(1.0, 2.0, field_constant=1.0)
        assert epr.joint_field(scn, math.pi / 2, 0.0) == pytest.approx(1j, abs=1e-15)


class TestFactorize:
    def test_phases_add_up(self):
        scn = epr.EprScenario(0.8, 3.0, particle_amplitudes=(1.0, 1.0))
        chi1, chi2 = epr.factorize(scn)
        x1 = np.linspace(-2, 2, 9)[:, None]
        x2 = np.linspace(-1, 3, 9)[None, :]
        prod = chi1(x1) * chi2(x2)
        expected = np.exp(1j * scn.p * (x1 - x2 + scn.offset) / scn.params.hbar)
        np.testing.assert_allclose(prod, expected, atol=1e-13)

    def test_null(self):
        chi1, chi2 = epr.factorize(epr.EprScenario(1.0, 2.0))
        assert chi1(0.3) == 0 and chi2(0.3) == 0

    def test_zero_momentum_constant(self):
        chi1, chi2 = epr.factorize(epr.EprScenario(1.0, 0.0, particle_amplitudes=(0.5, 2.0)))
        xs = np.linspace(-5, 5, 11)
        assert np.all(chi1(xs) == chi1(0.0))
        assert np.all(chi2(xs) == chi2(0.0))


class TestMomenta:
    def test_worked(self):
        assert epr.pair_momenta(epr.EprScenario(1.0, 2.0)) == (1.0, -1.0)

    def test_zero(self):
        p1, p2 = epr.pair_momenta(epr.EprScenario(1.0, 0.0))
        assert p1 == 0 and p2 == 0

    @given(st.floats(-1e6, 1e6, allow_subnormal=False))
    def test_exact_anticorrelation(self, p):
        p1, p2 = epr.pair_momenta(epr.EprScenario(1.0, p))
        assert p1 + p2 == 0.0
        assert epr.predict_partner_momentum(p1) == p2

    def test_nonnull_needs_flag(self):
        scn = epr.EprScenario(1.0, 2.0, particle_amplitudes=(0.3, 0.3))
        with pytest.raises(NonNullAmplitude):
            epr.pair_momenta(scn)
        p1, p2 = epr.pair_momenta(scn, general=True)
        assert p1 == pytest.approx(1.0 / math.sqrt(1 - 0.09))
        assert p1 + p2 == 0.0


class TestTracks:
    def test_start(self):
        scn = epr.EprScenario(1.5, 2.0, x1_0=0.25)
        tr = epr.pair_tracks(scn, 0.0)
        assert (tr.x1, tr.x2) == (0.25, 1.75)
        assert tr.x2 - tr.x1 == 1.5

    def test_worked(self):
        scn = epr.EprScenario(1.0, 2.0)
        tr = epr.pair_tracks(scn, 3.0)
        assert (float(tr.x1), float(tr.x2)) == (3.0, -2.0)
        assert float(tr.relative) == 5.0 == float(epr.relative_track(scn, 3.0))

    def test_negative_time(self):
        with pytest.raises(NegativeTime):
            epr.pair_tracks(epr.EprScenario(1.0, 2.0), -0.1)

    @given(st.floats(-100, 100), st.floats(-10, 10), st.floats(0.1, 10))
    def test_partner_position_prediction(self, x1, p, off):
        scn = epr.EprScenario(off, p, x1_0=x1)
        assert scn.x2_0 == epr.predict_partner_position(x1, off)

    @given(st.floats(-10, 10), st.floats(0.1, 10), st.floats(0.1, 5))
    def test_relative_motion_law(self, p, off, m):
        scn = epr.EprScenario(off, p, x1_0=0.5, params=PhysicalParams(m))
        t = np.linspace(0, 10, 11)
        tr = epr.pair_tracks(scn, t)
        np.testing.assert_allclose(tr.relative, epr.relative_track(scn, t), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(tr.x2 - tr.x1, off - p / m * t, rtol=1e-12, atol=1e-12)


class TestLocality:
    @given(st.sampled_from([None, "position", "momentum", "spin-z"]))
    def test_particle_one_ignores_remote_setting(self, setting):
        scn = epr.EprScenario(1.2, 2.0, x1_0=0.4)
        base = epr.particle_outputs(scn, 1, 2.0)
        assert epr.particle_outputs(scn, 1, 2.0, remote_setting=setting) == base

    def test_particle_one_ignores_partner_amplitude(self):
        a = epr.particle_outputs(epr.EprScenario(1.0, 2.0, particle_amplitudes=(0.1, 0.0)), 1, 1.0)
        b = epr.particle_outputs(epr.EprScenario(1.0, 2.0, particle_amplitudes=(0.1, 0.4)), 1, 1.0)
        assert a == b

    def test_completeness_at_time_zero(self):
        scn = epr.EprScenario(0.75, 3.0, x1_0=-0.5)
        p1, p2 = epr.pair_momenta(scn)
        assert epr.predict_partner_position(scn.x1_0, scn.offset) == scn.x2_0
        assert epr.predict_partner_momentum(p1) == p2


class TestNullField:
    def test_both_forms_null(self):
        reps = epr.null_field_representations(epr.EprScenario(1.0, 2.0))
        assert [r.form for r in reps] == ["delta", "plane_wave"]
        assert all(r.is_null for r in reps)

    def test_delta_form_amplitude(self):
        reps = epr.null_field_representations(epr.EprScenario(1.0, 2.0), amplitude_at_zero=1.0)
        assert not reps[0].is_null
        assert cmath.phase(reps[0].amplitude) == pytest.approx(math.pi / 4)


class TestAmplitudeLaw:
    t = np.geomspace(1e-3, 1e3, 50)

    def test_sqrt_law_passes(self):
        rep = epr.amplitude_law_check(1.0, 2.0, self.t)
        assert rep.passed(1e-10)
        np.testing.assert_allclose(rep.speeds, 2.0, rtol=1e-12)

    def test_null_constant(self):
        rep = epr.amplitude_law_check(0.0, 2.0, self.t)
        assert (rep.derivative_residual, rep.speed_residual, rep.balance_residual) == (0.0, 0.0, 0.0)

    def test_linear_law_fails(self):
        rep = epr.amplitude_law_check(1.0, 2.0, self.t, epr.AmplitudeLaw.linear_law(1.0))
        assert min(rep.derivative_residual, rep.speed_residual, rep.balance_residual) > 0.1

    def test_finite_difference_law_second_order(self):
        exact = epr.AmplitudeLaw.sqrt_law(1.0)
        t = np.array([0.5, 2.0, 7.0])
        errs = []
        for step in (4e-3, 2e-3):
            fd = epr.AmplitudeLaw.from_callable(lambda s: np.sqrt(s), rel_step=step)
            errs.append(np.max(np.abs(fd.first(t) - exact.first(t))))
        assert 3.5 <= errs[0] / errs[1] <= 4.5

    def test_non_positive_grid(self):
        with pytest.raises(ZeroTime):
            epr.amplitude_law_check(1.0, 2.0, [0.0, 1.0])


class TestEnsemble:
    def test_reproducible_and_partitionable(self):
        whole = epr.sample_ensemble(100, 42)
        parts = [epr.sample_ensemble(50, 42, start=0), epr.sample_ensemble(50, 42, start=50)]
        for name in ("relative_momentum", "x1_0", "offset"):
            joined = np.concatenate([getattr(p, name) for p in parts])
            np.testing.assert_array_equal(getattr(whole, name), joined)

    def test_seed_changes_draws(self):
        assert not np.array_equal(epr.sample_ensemble(10, 1).x1_0, epr.sample_ensemble(10, 2).x1_0)

    def test_exact_correlations(self):
        ens = epr.sample_ensemble(2000, 7)
        for i in range(len(ens)):
            scn = ens.scenario(i)
            p1, p2 = epr.pair_momenta(scn)
            assert p1 + p2 == 0.0
            assert scn.x2_0 - scn.x1_0 == scn.offset


class TestEigenfunctions:
    def test_momentum_modulus(self):
        u, w = epr.momentum_eigenfunctions(1.3, 0.5, PhysicalParams(hbar=2.0))
        xs = np.linspace(-4, 4, 9)
        np.testing.assert_allclose(np.abs(u(xs)) ** 2, 1 / (2 * math.pi * 2.0))
        np.testing.assert_allclose(np.abs(w(xs)) ** 2, 1 / (2 * math.pi * 2.0))

    def test_product_phase(self):
        p, off = 1.3, 0.5
        u, w = epr.momentum_eigenfunctions(p, off)
        x1, x2 = 0.7, -0.2
        assert cmath.phase(u(x1) * w(x2)) == pytest.approx(p * (x1 - x2 + off))


class TestDeltaReconstruction:
    def test_peak_on_constraint(self):
        val = epr.reconstruct_delta_1d(0.5, 1.5, 1.0, 20.0)
        # flat part of the taper contributes 0.9·2p_max, the cosine ramp half of 0.1·2p_max
        assert val.imag == pytest.approx(0.0, abs=1e-12)
        assert val.real == pytest.approx(20.0 * 0.95 / math.pi, rel=1e-9)

    def test_width_halves_with_doubled_cutoff(self):
        xs = np.linspace(0.0, 1.0, 4001)

        def first_zero(p_max):
            vals = epr.reconstruct_delta_1d(xs + 0.5, 1.5, 1.0, p_max).real
            return xs[np.argmax(vals < 0)]

        assert first_zero(20.0) / first_zero(40.0) == pytest.approx(2.0, rel=1e-2)

    @pytest.mark.parametrize("f", epr.standard_test_functions(center=0.5, width=1.0), ids=lambda f: f.name)
    def test_two_routes_agree(self, f):
        x2, off = 1.5, 1.0
        mom = epr.weak_delta_momentum_route(f, x2, off, 50.0, q=Q)
        pos = epr.weak_delta_position_route(f, x2, off, 1e-3, q=Q)
        exact = f.func(x2 - off)
        assert abs(mom - pos) < 1e-4
        assert abs(mom - exact) < 1e-3
        assert abs(pos - exact) < 1e-3

    def test_3d_on_constraint_is_product(self):
        r0 = np.array([1.0, -0.5, 0.25])
        r2 = np.array([1.5, 0.2, -0.3])
        val = epr.reconstruct_delta_3d(r2 - r0, r2, r0, 10.0)
        peak = epr.reconstruct_delta_1d(0.0, 0.0, 0.0, 10.0)
        assert val == pytest.approx(peak ** 3, rel=1e-10)

    def test_3d_off_axis_suppression(self):
        r0 = np.zeros(3)
        r2 = np.zeros(3)
        delta = 0.07
        val = epr.reconstruct_delta_3d([0.0, delta, 0.0], r2, r0, 10.0)
        peak = epr.reconstruct_delta_1d(0.0, 0.0, 0.0, 10.0)
        off = epr.reconstruct_delta_1d(delta, 0.0, 0.0, 10.0)
        assert val == pytest.approx(peak ** 2 * off, rel=1e-10)

    def test_3d_permutation(self):
        r1, r2, r0 = np.array([0.1, 0.2, 0.3]), np.array([0.05, -0.1, 0.2]), np.array([0.0, 0.25, 0.1])
        a = epr.reconstruct_delta_3d(r1, r2, r0, 8.0)
        perm = [2, 0, 1]
        b = epr.reconstruct_delta_3d(r1[perm], r2[perm], r0[perm], 8.0)
        assert a == pytest.approx(b, rel=1e-12)


def test_spin_note_present():
    assert "spin" in epr.SPIN_NOTE.lower()
