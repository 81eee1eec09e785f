import mpmath
import numpy as np
import pytest

from conftest import random_poly
from lowred.errors import InterpolationError, ValidationError
from lowred.interpolation import (TrigPolynomial, dirichlet, dirichlet_angle, eval_trig,
                                  grid_values, interpolate, magnitude_families)
from lowred.measurement import CIRCLE, MeasurementVector, measure, node_angles
from lowred.polyspace import Polynomial, UnitPoint, evaluate, omega


def abs2_at(p, theta):
    return np.abs(np.polyval(p.coeffs[::-1], np.exp(1j * theta))) ** 2


def direct_dirichlet(theta, d):
    k = np.arange(-(d - 1), d)
    return np.sum(np.exp(1j * np.outer(theta, k)), axis=1).real / (2 * d - 1)


class TestDirichlet:
    def test_one(self):
        assert dirichlet(UnitPoint(0.0), 5) == 1.0

    @pytest.mark.parametrize("d", [2, 3, 8])
    def test_vanishes_at_other_nodes(self, d):
        for l in range(1, 2 * d - 1):
            assert abs(dirichlet(omega(d).value ** l, d)) < 1e-14

    def test_closed_form_vs_direct_sum(self, rng):
        for d in (1, 2, 5, 16):
            theta = rng.uniform(-10, 10, 200)
            np.testing.assert_allclose(dirichlet_angle(theta, d), direct_dirichlet(theta, d),
                                       atol=1e-12)

    def test_mp(self):
        with mpmath.workdps(40):
            t = mpmath.mpf("0.3")
            assert abs(dirichlet_angle(t, 3) - mpmath.mpf(1) / 5 * (1 + 2 * mpmath.cos(t)
                                                                  + 2 * mpmath.cos(2 * t))) \
                < mpmath.mpf(10) ** -35


class TestInterpolate:
    def test_constant(self, rng):
        g = interpolate(np.full(7, 2.5))
        np.testing.assert_allclose(g.at_angles(rng.uniform(0, 7, 30)), 2.5, atol=1e-13)

    def test_node_reproduction(self, rng):
        d = 6
        s = rng.standard_normal(2 * d - 1)
        g = interpolate(s, d)
        np.testing.assert_allclose(g.at_angles(node_angles(d)), s, atol=1e-12)
        np.testing.assert_allclose([eval_trig(g, omega(d).value ** l) for l in range(1, 2 * d)],
                                   s, atol=1e-12)

    def test_exact_on_squared_magnitudes(self, rng):
        for d in (1, 2, 7, 16):
            p = random_poly(rng, d)
            g = interpolate(abs2_at(p, node_angles(d)))
            theta = rng.uniform(0, 2 * np.pi, 50)
            np.testing.assert_allclose(g.at_angles(theta), abs2_at(p, theta), rtol=0, atol=1e-10)

    def test_perturbation_sup_bound(self, rng):
        theta = 2 * np.pi * np.arange(10_000) / 10_000
        for d in (2, 5, 9):
            s = rng.standard_normal(2 * d - 1)
            gamma = rng.uniform(-1, 1, 2 * d - 1) * 1e-3
            dev = np.abs(interpolate(s + gamma).at_angles(theta) - interpolate(s).at_angles(theta))
            assert dev.max() <= (2 * d - 1) * np.abs(gamma).max()

    def test_linearity(self, rng):
        a, b = rng.standard_normal(9), rng.standard_normal(9)
        theta = rng.uniform(0, 2 * np.pi, 20)
        np.testing.assert_allclose(interpolate(a + b).at_angles(theta),
                                   interpolate(a).at_angles(theta) + interpolate(b).at_angles(theta),
                                   atol=1e-13)

    def test_vanishes_at_roots(self):
        roots = np.exp(1j * np.array([0.4, 2.1, -1.3]))
        p = Polynomial(np.poly(roots)[::-1])
        g = interpolate(abs2_at(p, node_angles(p.dim)))
        np.testing.assert_allclose(g.at_angles(np.angle(roots)), 0, atol=1e-9)

    def test_wrong_count(self):
        with pytest.raises(ValidationError):
            interpolate(np.ones(4))
        with pytest.raises(ValidationError):
            interpolate(np.ones(5), d=2)

    def test_complex_samples_rejected(self):
        g = TrigPolynomial(np.array([1j, 0, 0]))
        with pytest.raises(InterpolationError):
            g.at_angles(0.5)

    def test_grid_values_match_pointwise(self, rng):
        g = interpolate(rng.standard_normal(7))
        n = 40
        np.testing.assert_allclose(grid_values(g, n), g.at_angles(2 * np.pi * np.arange(n) / n),
                                   atol=1e-13)


class TestMagnitudeFamilies:
    def test_noiseless(self, rng):
        d = 5
        p = random_poly(rng, d)
        f0, f1, f2 = magnitude_families(measure(p))
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
        pz = np.polyval(p.coeffs[::-1], z)
        pzn = np.polyval(p.coeffs[::-1], z * np.exp(2j * np.pi / d))
        np.testing.assert_allclose(f0(z), abs(pz) ** 2, atol=1e-10)
        np.testing.assert_allclose(f1(z), abs(pz - pzn) ** 2, atol=1e-10)
        np.testing.assert_allclose(f2(z), abs(pz - 1j * pzn) ** 2, atol=1e-10)

    def test_constant_polynomial(self, rng):
        _, f1, _ = magnitude_families(measure(Polynomial([0.3 + 0.2j, 0, 0])))
        np.testing.assert_allclose(f1.at_angles(rng.uniform(0, 7, 20)), 0, atol=1e-15)

    def test_zero(self, rng):
        for f in magnitude_families(MeasurementVector(np.zeros(9), CIRCLE, 2)):
            assert not np.any(f.at_angles(rng.uniform(0, 7, 10)))

    def test_band_alignment(self, rng):
        d = 4
        m = measure(random_poly(rng, d))
        f0 = magnitude_families(m)[0]
        np.testing.assert_allclose(f0.at_angles(node_angles(d)), m.band(1), atol=1e-13)

    def test_basis_measurements_rejected(self):
        with pytest.raises(ValidationError):
            magnitude_families(MeasurementVector(np.ones(4), "basis", 2))

    def test_mp_path(self, rng):
        p = random_poly(rng, 3)
        with mpmath.workdps(50):
            f0 = magnitude_families(measure(p.to_mp()))[0]
            t = mpmath.mpf("1.1")
            want = abs(evaluate(p.to_mp(), UnitPoint(t))) ** 2
            assert abs(f0.at_angles(t) - want) < mpmath.mpf(10) ** -40
