import inspect
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfield import position
from pfield.core import PhysicalParams, oscillator_residual
from pfield.errors import NotNormalizable, OutOfSlit
from pfield.position import (
    SlitField,
    SlitSpec,
    f_series,
    mean_position,
    pf_position,
    slit_field_eval,
    slit_wavenumber,
    unfolding_energy,
)


@st.composite
def slits(draw):
    a = draw(st.floats(-10, 10))
    da = draw(st.floats(1e-4, 2.0))
    n = draw(st.integers(1, 20))
    b = draw(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=12))
    N = draw(st.integers(1, 15))
    return SlitSpec(a, da, n, tuple(b), N)


class TestSeries:
    def test_left_edge(self):
        assert f_series(SlitSpec(0.3, 0.1), 0.3) == 0.0

    def test_right_edge(self):
        spec = SlitSpec(0.0, 0.1, 1, (1.0, 0.5, 0.25))
        assert abs(f_series(spec, 0.1)) < 1e-15

    def test_worked_value(self):
        assert f_series(SlitSpec(0.0, 0.1), 0.025) == pytest.approx(1 / math.pi, rel=1e-14)

    def test_alternating_signs(self):
        spec = SlitSpec(0.0, 1.0, 1, (1.0, 1.0))
        x = 0.1
        k = math.pi
        expected = (math.sin(2 * k * x) - math.sin(4 * k * x)) / math.pi
        assert f_series(spec, x) == pytest.approx(expected, rel=1e-14)

    def test_truncation_pads_and_cuts(self):
        assert SlitSpec(0, 1, 1, (1.0, 2.0, 3.0), 2).coefficients.tolist() == [1.0, 2.0]
        assert SlitSpec(0, 1, 1, (1.0,), 3).coefficients.tolist() == [1.0, 0.0, 0.0]

    def test_outside(self):
        with pytest.raises(OutOfSlit):
            f_series(SlitSpec(0.0, 0.1), 0.2)

    @given(slits())
    @settings(max_examples=200, deadline=None)
    def test_vanishes_at_both_edges(self, spec):
        tol = 1e-10 * max(1.0, float(np.abs(spec.coefficients).sum()))
        assert abs(f_series(spec, spec.slit_left)) <= tol
        assert abs(f_series(spec, spec.slit_left + spec.slit_width)) <= tol

    @given(slits(), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_shift_bound(self, spec, u):
        x = spec.slit_left + u * spec.slit_width
        x = min(x, spec.slit_left + spec.slit_width)
        shift = abs(pf_position(spec, x) - (x - spec.slit_left))
        assert shift <= spec.shift_bound() * (1 + 1e-12) + 1e-15


class TestPosition:
    def test_bare_particle(self):
        spec = SlitSpec(1.0, 0.5, 2, (0.0, 0.0))
        xs = np.linspace(1.0, 1.5, 11)
        np.testing.assert_array_equal(pf_position(spec, xs), xs - 1.0)

    def test_worked(self):
        q = pf_position(SlitSpec(0.0, 0.1), 0.025)
        assert q == pytest.approx(0.025 + 0.1 / math.pi, abs=1e-12)

    def test_narrowing_slit_unfolds(self):
        ratios = []
        for da in (1.0, 0.1, 0.01, 1e-3):
            spec = SlitSpec(0.0, da, 1, (1.0,))
            x = 0.3 * da
            ratios.append(pf_position(spec, x) / x)
        # the shift scales with δa like the offset itself; the absolute gap closes
        gaps = [abs(pf_position(SlitSpec(0.0, da), 0.3 * da) - 0.3 * da)
                for da in (1.0, 0.1, 0.01, 1e-3)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3
        assert np.allclose(ratios, ratios[0])

    def test_no_inverse_exposed(self):
        names = [n for n in dir(position) if "inverse" in n or n.startswith("recover")]
        assert names == []
        assert list(inspect.signature(pf_position).parameters) == ["spec", "x"]


class TestSlitField:
    def test_null_amplitude(self):
        f = SlitField(0.0, 2.0, 1.0, 0.3)
        np.testing.assert_array_equal(slit_field_eval(f, np.linspace(0, 5, 9)), 0.0)

    def test_origin(self):
        assert slit_field_eval(SlitField(1.0, 2.0, 1.0, 0.0), 0.0) == 0.0

    def test_worked(self):
        f = SlitField(1.0, 2.0, 1.0, math.pi / 4)
        assert slit_field_eval(f, math.pi / 8) == pytest.approx(1.0, rel=1e-15)

    def test_oscillator_law(self):
        f = SlitField.from_velocity(0.7, 3.0, 1.5, 0.2)
        assert f.angular_frequency == 4.5
        sf = f.as_stationary()
        r1 = oscillator_residual(sf, None, f.angular_frequency, +1, 0.3, h=2e-2)
        r2 = oscillator_residual(sf, None, f.angular_frequency, +1, 0.3, h=1e-2)
        assert r2 < 1e-3
        assert 3.5 <= r1 / r2 <= 4.5
        np.testing.assert_allclose(sf(0.3), slit_field_eval(f, 0.3))


class TestUnfolding:
    def test_null(self):
        rep = unfolding_energy(SlitSpec(0.0, 0.1), 0.0, 1.3)
        assert rep.field_energy == 0.0
        assert rep.particle_energy == pytest.approx(0.5 * 1.3 ** 2)

    def test_quadratic(self):
        spec = SlitSpec(0.0, 0.1)
        a = unfolding_energy(spec, 0.2, 1.0, 2.0).field_energy
        b = unfolding_energy(spec, 0.1, 1.0, 2.0).field_energy
        assert b == pytest.approx(a / 4)

    def test_worked(self):
        rep = unfolding_energy(SlitSpec(0.0, 0.1), 0.1, 1.0, 2.0)
        assert rep.field_energy == pytest.approx(0.02)
        assert rep.field_fraction == pytest.approx(0.04)

    def test_release_report(self):
        rep = unfolding_energy(SlitSpec(0.0, 0.1), 0.0, 1.0, 2.0)
        assert rep.released_to_particle(0.02) == pytest.approx(0.02)

    def test_default_frequency_from_mode(self):
        spec = SlitSpec(0.0, 0.5, 2)
        rep = unfolding_energy(spec, 0.1, 1.5)
        w = spec.mode_wavenumber * 1.5
        assert rep.field_energy == pytest.approx(0.5 * w * w * 0.01)


def test_slit_wavenumber_dimensions():
    p = PhysicalParams(2.0, 3.0)
    assert slit_wavenumber(p, 4.0) == pytest.approx(math.sqrt(2 * 2.0 * 4.0) / 3.0)


class TestMeanPosition:
    def test_symmetric(self):
        x = np.linspace(-5, 9, 1401)
        assert mean_position(np.exp(-(x - 2) ** 2), x) == pytest.approx(2.0, abs=1e-12)

    def test_nascent_delta(self):
        a, s = 0.4, 1e-3
        x = np.linspace(a - 0.05, a + 0.05, 20001)
        psi = np.sqrt(np.exp(-0.5 * ((x - a) / s) ** 2))
        assert abs(mean_position(psi, x) - a) <= s * 1e-3

    def test_two_point_mixture(self):
        x = np.linspace(-4, 4, 8001)
        w, a1, a2, s = 0.3, -1.0, 2.0, 0.05
        dens = w * np.exp(-0.5 * ((x - a1) / s) ** 2) + (1 - w) * np.exp(-0.5 * ((x - a2) / s) ** 2)
        assert mean_position(np.sqrt(dens), x) == pytest.approx(w * a1 + (1 - w) * a2, abs=1e-10)

    def test_empty(self):
        with pytest.raises(NotNormalizable):
            mean_position(np.zeros(10), np.arange(10.0))
