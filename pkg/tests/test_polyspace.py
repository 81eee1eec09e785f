import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_poly
from lowred.errors import ValidationError
from lowred.harness import worst_case_fixture
from lowred.polyspace import (Polynomial, UnitPoint, evaluate, inner, kernel_poly, norm, nu,
                              omega, rho, truncate)


def quadrature_inner(p, q, n):
    t = 2 * np.pi * np.arange(n) / n
    z = np.exp(1j * t)
    return np.mean(np.polyval(p.coeffs[::-1], z) * np.conj(np.polyval(q.coeffs[::-1], z)))


def grid_rho(x, y, n=100_000):
    phases = np.exp(2j * np.pi * np.arange(n) / n)
    diffs = x.coeffs[None, :] - phases[:, None] * y.coeffs[None, :]
    return np.sqrt(np.min(np.sum(np.abs(diffs) ** 2, axis=1)))


class TestEvaluate:
    def test_constant(self):
        p = Polynomial([2 - 3j, 0, 0])
        assert evaluate(p, UnitPoint(1.234)) == 2 - 3j

    def test_monomial_at_omega(self):
        d, k = 5, 3
        w = omega(d)
        assert abs(evaluate(Polynomial.monomial(k, d), w) - w.value ** k) < 1e-15

    def test_fixture_at_one_is_coefficient_sum(self):
        # sum of the printed coefficients, added by hand
        expected = complex(-0.59789011, -1.3935443)
        assert abs(evaluate(worst_case_fixture(), UnitPoint(0.0)) - expected) < 1e-12

    def test_matches_numpy(self, rng):
        p = random_poly(rng, 9)
        pts = [UnitPoint(a) for a in rng.uniform(0, 2 * np.pi, 20)]
        got = evaluate(p, pts)
        want = np.polyval(p.coeffs[::-1], np.array([z.value for z in pts]))
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)

    def test_mp_evaluation_keeps_digits(self):
        with mpmath.workdps(50):
            p = Polynomial([1, 1]).to_mp()
            val = evaluate(p, UnitPoint.from_turns(1, 3, mp=True))
            # 1 + omega = e^{i pi/3}
            assert abs(val - mpmath.expjpi(mpmath.mpf(1) / 3)) < mpmath.mpf(10) ** -45


class TestKernel:
    def test_w_one(self):
        np.testing.assert_array_equal(kernel_poly(UnitPoint(0.0), 3).coeffs, [1, 1, 1])

    @pytest.mark.parametrize("d", [2, 3, 7, 16])
    def test_rotated_kernels_orthogonal(self, d, rng):
        w = UnitPoint(rng.uniform(0, 2 * np.pi))
        kw = kernel_poly(w, d)
        for j in range(1, d):
            assert abs(inner(kw, kernel_poly(w.rotated(j, d), d))) < 1e-12

    def test_reproducing(self, rng):
        for _ in range(100):
            d = int(rng.integers(1, 17))
            p = random_poly(rng, d)
            w = UnitPoint(rng.uniform(0, 2 * np.pi))
            assert abs(inner(p, kernel_poly(w, d)) - evaluate(p, w)) <= 1e-11

    @pytest.mark.parametrize("d", [1, 4, 16])
    def test_scaled_kernel_basis_orthonormal(self, d, rng):
        z0 = UnitPoint(rng.uniform(0, 2 * np.pi))
        basis = np.array([kernel_poly(z0.rotated(j, d), d).coeffs for j in range(1, d + 1)])
        basis /= np.sqrt(d)
        gram = basis @ basis.conj().T
        np.testing.assert_allclose(gram, np.eye(d), atol=1e-11)


class TestInnerNorm:
    def test_self_inner(self, rng):
        p = random_poly(rng, 6)
        assert abs(inner(p, p) - norm(p) ** 2) < 1e-13

    def test_monomials_orthogonal(self):
        e = [Polynomial.monomial(k, 4) for k in range(4)]
        assert inner(e[0], e[2]) == 0 and inner(e[1], e[1]) == 1

    @pytest.mark.parametrize("d", [1, 3, 8, 16])
    def test_against_quadrature(self, d, rng):
        p, q = random_poly(rng, d), random_poly(rng, d)
        # 8d trapezoidal nodes integrate degree < 8d exactly
        assert abs(inner(p, q) - quadrature_inner(p, q, 8 * d)) < 1e-12

    def test_parseval(self, rng):
        for d in range(1, 17):
            p = random_poly(rng, d)
            sq = norm(p) ** 2
            assert abs(sq - np.sum(np.abs(p.coeffs) ** 2)) <= 1e-12
            assert abs(sq - quadrature_inner(p, p, 8 * d).real) <= 1e-9


class TestTruncate:
    def test_full_is_identity(self, rng):
        p = random_poly(rng, 5)
        np.testing.assert_array_equal(truncate(p, 5).coeffs, p.coeffs)

    def test_slice(self):
        np.testing.assert_array_equal(truncate(Polynomial([1, 2, 3]), 1).coeffs, [1])

    def test_zero_truncation_allowed(self):
        t = truncate(Polynomial([0, 1, 2]), 1)
        assert t.is_zero

    @pytest.mark.parametrize("n", [0, 4])
    def test_bad_length(self, n):
        with pytest.raises(ValidationError):
            truncate(Polynomial([1, 2, 3]), n)


class TestRho:
    def test_global_phase(self, rng):
        x = random_poly(rng, 5)
        assert rho(x, x.scaled(1j)) < 1e-15

    def test_orthonormal_pair(self):
        assert abs(rho(Polynomial([1, 0]), Polynomial([0, 1])) - np.sqrt(2)) < 1e-15

    def test_zero_argument(self, rng):
        x = random_poly(rng, 4)
        assert abs(rho(x, Polynomial(np.zeros(4))) - norm(x)) < 1e-14

    def test_against_phase_grid(self, rng):
        for d in (1, 3, 7):
            x, y = random_poly(rng, d), random_poly(rng, d)
            assert abs(rho(x, y) - grid_rho(x, y)) <= 1e-8

    def test_tiny_distances_resolved(self, rng):
        x = random_poly(rng, 6, unit=True)
        delta = 1e-12 * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
        # orthogonal to x, so the phase cannot absorb any of it
        delta -= np.vdot(x.coeffs, delta) * x.coeffs
        y = Polynomial(np.exp(0.7j) * (x.coeffs + delta))
        assert abs(rho(x, y) - np.linalg.norm(delta)) < 1e-14

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            rho(Polynomial([1]), Polynomial([1, 2]))


complex_vecs = st.lists(
    st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=3, max_size=3
).map(lambda v: Polynomial([complex(a, b) for a, b in v]))


@settings(max_examples=200, deadline=None)
@given(complex_vecs, complex_vecs, complex_vecs, st.floats(0, 2 * np.pi))
def test_rho_metric_axioms(x, y, z, theta):
    tol = 1e-9 * (1 + norm(x) + norm(y) + norm(z))
    assert rho(x, y) >= 0
    assert abs(rho(x, y) - rho(y, x)) <= tol
    assert abs(rho(x, y.scaled(np.exp(1j * theta))) - rho(x, y)) <= tol
    assert rho(x, z) <= rho(x, y) + rho(y, z) + tol


class TestSerialization:
    def test_json_round_trip(self, rng):
        p = random_poly(rng, 4)
        q = Polynomial.from_json(p.to_json())
        np.testing.assert_array_equal(p.coeffs, q.coeffs)

    def test_format(self):
        data = json.loads(Polynomial([1 + 2j, -3]).to_json())
        assert data == {"dim": 2, "coeffs": [[1.0, 2.0], [-3.0, 0.0]]}

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Polynomial.from_json('{"dim": 3, "coeffs": [[1, 0]]}')

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            Polynomial([])


def test_roots_of_unity():
    assert abs(omega(3).value - np.exp(2j * np.pi / 5)) < 1e-15
    assert abs(nu(4).value - 1j) < 1e-15
