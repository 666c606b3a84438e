import numpy as np
import pytest

from wedgewave.errors import NotIntegrable
from wedgewave.expsum import ExpSum, integrate_halfline, integrate_halfline_quadrature
from wedgewave.material import from_poisson, solve_rayleigh
from wedgewave.mode import build_uR, build_vR, mode_norm_sq_exact, norm_U0_sq, stress

SIGMAS = (-0.5, 0.0, 0.25, 0.4)


def rayleigh(sigma):
    return solve_rayleigh(from_poisson(sigma, 1.0))


class TestExpSum:
    def test_integrate_examples(self):
        assert integrate_halfline(ExpSum.exponential(1.0, 1.0)) == pytest.approx(1.0)
        assert integrate_halfline(ExpSum.exponential(1.0, 2.0, power=1)) == pytest.approx(0.25)
        with pytest.raises(NotIntegrable):
            integrate_halfline(ExpSum.exponential(1.0, 0.0))

    def test_algebra_pointwise(self):
        rng = np.random.default_rng(3)
        terms_a = [(rng.standard_normal() + 1j * rng.standard_normal(), p, r)
                   for p, r in ((0, 0.7), (1, 1.3), (2, 0.7))]
        terms_b = [(rng.standard_normal() + 1j * rng.standard_normal(), p, r)
                   for p, r in ((0, 1.1), (1, 0.4))]
        a, b = ExpSum(terms_a), ExpSum(terms_b)
        x = np.linspace(0.0, 5.0, 20)
        assert np.allclose((a + b).evaluate(x), a.evaluate(x) + b.evaluate(x), atol=1e-12)
        assert np.allclose((a * b).evaluate(x), a.evaluate(x) * b.evaluate(x), atol=1e-12)
        assert np.allclose((2.5 * a).evaluate(x), 2.5 * a.evaluate(x), atol=1e-14)

    def test_derivative_finite_difference(self):
        s = ExpSum([(1.0 + 0.5j, 0, 0.9), (2.0, 1, 1.7), (-0.3j, 2, 0.9)])
        d = s.derivative()
        h = 1e-6
        x = np.linspace(0.1, 4.0, 15)
        fd = (s.evaluate(x + h) - s.evaluate(x - h)) / (2 * h)
        assert np.max(np.abs(fd - d.evaluate(x))) < 1e-6 * max(1.0, np.max(np.abs(d.evaluate(x))))

    def test_merge_cancellation(self):
        s = ExpSum([(1.0, 0, 2.0), (-1.0, 0, 2.0)])
        assert s.terms == ()
        assert s.max_coeff() == 0.0

    def test_quadrature_oracle_matches_exact(self):
        s = ExpSum([(1.3 - 0.2j, 0, 0.5), (0.7j, 1, 1.2), (-0.4, 3, 2.0)])
        exact = integrate_halfline(s)
        quad = integrate_halfline_quadrature(s)
        assert abs(exact - quad) < 1e-12 * abs(exact)


class TestRayleighMode:
    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_surface_values(self, sigma):
        sol = rayleigh(sigma)
        k = 1.0
        uR = build_uR(sol, k)
        kt, kl = sol.kappa_t, sol.kappa_l
        u2_0 = uR.base[1].evaluate(0.0)
        u3_0 = uR.base[2].evaluate(0.0)
        assert u2_0 == pytest.approx(1j * kl * (kt**2 - 1) / (1 + kt**2), abs=1e-14)
        assert u3_0 == pytest.approx(1.0 - 2 * kl * kt / (1 + kt**2), abs=1e-14)

    def test_decay_at_infinity(self):
        uR = build_uR(rayleigh(0.25), 1.0)
        far = max(abs(c.evaluate(200.0)) for c in uR.base)
        assert far < 1e-30

    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_traction_free_surface(self, sigma):
        uR = build_uR(rayleigh(sigma), 1.0)
        for n in (1, 2, 3):
            assert abs(stress(uR, n, 2, 0.0).evaluate(0.0)) < 1e-12

    def test_vR_structure(self):
        sol = rayleigh(0.25)
        k = 2.0
        uR, vR = build_uR(sol, k), build_vR(sol, k)
        x = np.linspace(0.0, 6.0, 13)
        # at x1 = 0 only the first component survives
        prof0 = vR.profile(0.0)
        assert np.allclose(prof0[0].evaluate(x), (-1j / k) * uR.base[2].evaluate(x), atol=1e-14)
        assert prof0[1].max_coeff() == 0.0 and prof0[2].max_coeff() == 0.0
        # d/dx1 of vR recovers the Rayleigh profile in components 2, 3
        d1 = vR.d1()
        assert np.allclose(d1.base[1].evaluate(x), uR.base[1].evaluate(x), atol=1e-14)
        assert np.allclose(d1.base[2].evaluate(x), uR.base[2].evaluate(x), atol=1e-14)
        # v1(0, 0)
        kt, kl = sol.kappa_t, sol.kappa_l
        assert prof0[0].evaluate(0.0) == pytest.approx(
            (-1j / k) * (1 - 2 * kl * kt / (1 + kt**2)), abs=1e-14
        )

    def test_stress_symmetry_and_s11(self):
        sol = rayleigh(0.3)
        k = 1.0
        for field in (build_uR(sol, k), build_vR(sol, k)):
            x = np.linspace(0.0, 4.0, 9)
            for n in (1, 2, 3):
                for m in (1, 2, 3):
                    a = stress(field, n, m, 0.7).evaluate(x)
                    b = stress(field, m, n, 0.7).evaluate(x)
                    assert np.allclose(a, b, atol=1e-13)
        uR = build_uR(sol, k)
        lam = sol.material.lam
        s11 = stress(uR, 1, 1, 0.0)
        expect = lam * (uR.base[1].derivative() + (1j * k) * uR.base[2])
        x = np.linspace(0.0, 5.0, 11)
        assert np.allclose(s11.evaluate(x), expect.evaluate(x), atol=1e-13)

    @pytest.mark.parametrize("sigma", SIGMAS)
    def test_norm_closed_form_vs_exact(self, sigma):
        sol = rayleigh(sigma)
        for k in (1.0, 3.0):
            exact = mode_norm_sq_exact(build_uR(sol, k))
            closed = norm_U0_sq(sol, k)
            assert exact == pytest.approx(closed, rel=1e-12)
            assert closed > 0

    def test_norm_scales_inversely_with_k(self):
        sol = rayleigh(0.25)
        assert norm_U0_sq(sol, 2.0) == pytest.approx(norm_U0_sq(sol, 1.0) / 2.0, rel=1e-13)

    def test_phase_invariance(self):
        sol = rayleigh(0.25)
        k = 1.0
        phase = np.exp(0.73j)
        base = build_uR(sol, k)
        rotated = build_uR(sol, k, amplitude=phase)
        assert mode_norm_sq_exact(rotated) == pytest.approx(mode_norm_sq_exact(base), rel=1e-13)
        x = np.linspace(0.0, 4.0, 9)
        for c0, c1 in zip(base.base, rotated.base):
            assert np.allclose(np.abs(c0.evaluate(x)), np.abs(c1.evaluate(x)), atol=1e-13)
