import numpy as np
import pytest

from wedgewave.errors import ConstraintViolation, GridTooCoarse
from wedgewave.expsum import ExpSum
from wedgewave.material import RayleighSolution, from_poisson, solve_rayleigh
from wedgewave.mode import build_uR
from wedgewave.pencil import (
    HalfLineGrid,
    assemble_pencil,
    build_discrete_pencil,
    compute_b_closed,
    compute_b_quadrature,
    count_strip_eigenvalues,
    default_xi_samples,
    discrete_cutoff,
    dispersion_dip_location,
    form_lower_bound,
    min_singular_scan,
    min_singular_value,
    residual_eigenpair,
    residual_jordan,
    rotation_x1x3,
)

SIGMAS = (-0.5, 0.0, 0.25, 0.4)
SIGMA_GRID_20 = np.linspace(-0.95, 0.48, 20)


def rayleigh(sigma):
    return solve_rayleigh(from_poisson(sigma, 1.0))


class TestAssembly:
    def test_xi_zero_entries(self):
        mat = from_poisson(0.25, 1.0)
        lam, mu = mat.lam, mat.mu
        k = 1.3
        op = assemble_pencil(mat, 0.0, k)
        assert op.A0[0, 2] == 0 and op.A0[2, 0] == 0  # (1,3) couplings vanish
        assert op.A0[2, 2] == pytest.approx((lam + 2 * mu) * k**2)
        assert op.A2[2, 2] == pytest.approx(-mu)
        assert op.A0[0, 0] == pytest.approx(mu * k**2)

    def test_general_xi_entries(self):
        mat = from_poisson(0.1, 2.0)
        lam, mu = mat.lam, mat.mu
        xi, k = 0.3 + 0.2j, 1.1
        op = assemble_pencil(mat, xi, k)
        assert op.A0[0, 0] == pytest.approx(mu * k**2 - (lam + 2 * mu) * xi**2)
        assert op.A1[0, 1] == pytest.approx(-(lam + mu) * xi)
        assert op.A0[0, 2] == pytest.approx(-(lam + mu) * 1j * xi * k)
        assert op.B0[1, 0] == pytest.approx(-lam * xi)
        assert op.B1[1, 1] == pytest.approx(-(lam + 2 * mu))
        assert op.B0[1, 2] == pytest.approx(-lam * 1j * k)

    def test_rotation_identity(self):
        mat = from_poisson(0.25, 1.0)
        k = 1.0
        for eta in (0.5, 1.0):
            kp = np.hypot(k, eta)
            M = rotation_x1x3(np.arctan2(eta, k))
            Minv = np.linalg.inv(M)
            a = assemble_pencil(mat, 1j * eta, k)
            b = assemble_pencil(mat, 0.0, kp)
            for xa, xb in ((a.A0, b.A0), (a.A1, b.A1), (a.A2, b.A2), (a.B0, b.B0), (a.B1, b.B1)):
                assert np.max(np.abs(xa - Minv @ xb @ M)) < 1e-13

    def test_linearity_in_moduli(self):
        xi, k, s = 0.2 + 0.1j, 0.9, 3.7
        a = assemble_pencil(from_poisson(0.2, 1.0), xi, k)
        mat = from_poisson(0.2, 1.0)
        b = assemble_pencil(type(mat)(lam=s * mat.lam, mu=s * mat.mu), xi, k)
        for xa, xb in ((a.A0, b.A0), (a.A1, b.A1), (a.A2, b.A2), (a.B0, b.B0), (a.B1, b.B1)):
            assert np.max(np.abs(s * xa - xb)) < 1e-12 * s


class TestJordanChain:
    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("k", [1.0, 3.0])
    def test_eigenpair_residual(self, sigma, k):
        assert residual_eigenpair(rayleigh(sigma), k) < 1e-11

    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("k", [1.0, 3.0])
    def test_jordan_residual(self, sigma, k):
        assert residual_jordan(rayleigh(sigma), k) < 1e-11

    def test_eigenpair_sensitivity(self):
        sol = rayleigh(0.25)
        perturbed = RayleighSolution(material=sol.material, c_R=sol.c_R + 1e-3)
        assert residual_eigenpair(perturbed, 1.0, field=build_uR(perturbed, 1.0)) > 1e-5

    def test_jordan_zero_candidate(self):
        sol = rayleigh(0.25)
        zero = (ExpSum.zero(), ExpSum.zero(), ExpSum.zero())
        assert residual_jordan(sol, 1.0, w1=zero) > 1e-3


class TestCoefficientB:
    @pytest.mark.parametrize("sigma", SIGMA_GRID_20)
    def test_quadrature_matches_closed(self, sigma):
        sol = rayleigh(sigma)
        for k in (1.0, 2.0):
            bq = compute_b_quadrature(sol, k)
            bc = compute_b_closed(sol, k)
            assert abs(bq.imag) < 1e-12
            assert bq.real < 0
            assert bq.real == pytest.approx(bc, rel=1e-11)

    def test_k_scaling(self):
        sol = rayleigh(0.25)
        assert compute_b_quadrature(sol, 2.0).real == pytest.approx(
            compute_b_quadrature(sol, 1.0).real / 2.0, rel=1e-12
        )

    def test_small_B_cubic_limit(self):
        # near sigma -> -1 the coefficient decays like B^3 with a known constant
        ratios = []
        for sigma in (-0.97, -0.99):
            sol = rayleigh(sigma)
            mat = sol.material
            ratios.append(compute_b_closed(sol, 1.0) / sol.B**3 * 4.0 / (mat.lam + 2 * mat.mu))
        assert ratios[0] == pytest.approx(-1.0, rel=0.2)
        assert ratios[1] == pytest.approx(-1.0, rel=0.1)

    @pytest.mark.parametrize("sigma", SIGMA_GRID_20[::5])
    def test_obstruction_nonzero(self, sigma):
        assert compute_b_closed(rayleigh(sigma), 1.0) < 0


class TestDiscreteScan:
    def setup_method(self):
        self.mat = from_poisson(0.25, 1.0)
        self.sol = solve_rayleigh(self.mat)
        self.k = 1.0
        self.grid = HalfLineGrid.uniform(900, 30.0 / self.sol.kappa_t)

    def test_scan_structure(self):
        report = min_singular_scan(self.mat, self.k, self.grid, default_xi_samples(self.mat, self.k))
        assert report.is_single_cluster_at_origin()
        radii = np.abs(report.xi_samples)
        assert report.flagged[radii == 0.0].all()
        beta = report.beta
        for target in (beta / 2, beta):
            near = np.isclose(np.abs(report.xi_samples.real), target) & (report.xi_samples.imag == 0)
            assert not report.flagged[near].any()
        imag_axis = np.abs(report.xi_samples.imag) > 0
        assert not report.flagged[imag_axis].any()

    def test_imaginary_axis_gap_grows(self):
        w = discrete_cutoff(self.mat, self.k, self.grid)
        vals = [
            min_singular_value(build_discrete_pencil(self.mat, 1j * eta, self.k, self.grid, w))
            for eta in (0.5, 1.0, 2.0, 5.0)
        ]
        assert all(v > 0.05 for v in vals)
        assert vals == sorted(vals)

    def test_samples_outside_strip_rejected(self):
        with pytest.raises(ConstraintViolation):
            min_singular_scan(self.mat, self.k, self.grid, [10.0 + 0j])

    def test_grid_too_coarse(self):
        coarse = HalfLineGrid.uniform(24, 30.0 / self.sol.kappa_t)
        with pytest.raises(GridTooCoarse):
            min_singular_scan(
                self.mat, self.k, coarse,
                default_xi_samples(self.mat, self.k), check_refinement=True,
            )

    def test_refinement_check_passes_on_fine_grid(self):
        report = min_singular_scan(
            self.mat, self.k, self.grid,
            default_xi_samples(self.mat, self.k), check_refinement=True,
        )
        assert report.median > 0

    def test_discrete_cutoff_converges(self):
        w1 = discrete_cutoff(self.mat, self.k, HalfLineGrid.uniform(500, 30.0 / self.sol.kappa_t))
        w2 = discrete_cutoff(self.mat, self.k, HalfLineGrid.uniform(1000, 30.0 / self.sol.kappa_t))
        exact = self.sol.omega_sq(self.k)
        assert abs(w2 - exact) < 0.3 * abs(w1 - exact)

    def test_multiplicity_two(self):
        grid = HalfLineGrid.uniform(160, 30.0 / self.sol.kappa_t)
        w = discrete_cutoff(self.mat, self.k, grid)
        count = count_strip_eigenvalues(self.mat, self.k, grid, radius=0.5 * self.k * self.sol.kappa_t,
                                        omega_sq=w)
        assert count == 2


class TestFormLowerBound:
    def setup_method(self):
        self.mat = from_poisson(0.25, 1.0)
        self.sol = solve_rayleigh(self.mat)
        self.k = 1.0
        self.grid = HalfLineGrid.uniform(1200, 30.0 / self.sol.kappa_t)

    def test_eta_zero_attains_cutoff(self):
        val = form_lower_bound(self.mat, self.k, 0.0, self.grid)
        cutoff = self.sol.omega_sq(self.k)
        assert val >= cutoff * (1 - 1e-10)
        assert val == pytest.approx(cutoff, rel=2e-2)

    @pytest.mark.parametrize("eta", [1.0, 2.0])
    def test_eta_bound(self, eta):
        val = form_lower_bound(self.mat, self.k, eta, self.grid)
        assert val >= 0.98 * self.sol.c_R**2 * (self.k**2 + eta**2)

    def test_form_matches_direct_quadrature(self):
        # u^H F u must equal the quadratic form of the interpolated profile
        from wedgewave.pencil import assemble_quadratic_form

        eta = 0.7
        F, M3 = assemble_quadratic_form(self.mat, self.k, eta, self.grid)
        lam, mu = self.mat.lam, self.mat.mu
        l2m = lam + 2 * mu
        x = self.grid.nodes[:-1]
        rng = np.random.default_rng(11)
        c = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        decay = np.exp(-0.8 * x)
        u = [c[2 * i] * decay + c[2 * i + 1] * x * decay for i in range(3)]
        du = [
            -0.8 * u[i] + (c[2 * i + 1] * decay) for i in range(3)
        ]
        vec = np.concatenate(u)
        quad = np.vdot(vec, F @ vec).real

        xi = 1j * eta
        k = self.k
        integrand = (
            mu * np.abs(du[0]) ** 2
            + (mu * k**2 + l2m * eta**2) * np.abs(u[0]) ** 2
            + l2m * np.abs(du[1]) ** 2
            + mu * (k**2 + eta**2) * np.abs(u[1]) ** 2
            + mu * np.abs(du[2]) ** 2
            + (l2m * k**2 + mu * eta**2) * np.abs(u[2]) ** 2
            + (lam * xi * (u[0] * np.conj(du[1]) - du[1] * np.conj(u[0]))).real * 1.0
            + (mu * xi * (u[1] * np.conj(du[0]) - du[0] * np.conj(u[1]))).real
            + (lam * 1j * k * (u[2] * np.conj(du[1]) - du[1] * np.conj(u[2]))).real
            + (mu * 1j * k * (u[1] * np.conj(du[2]) - du[2] * np.conj(u[1]))).real
            - ((lam + mu) * 1j * k * xi * (u[0] * np.conj(u[2]) + u[2] * np.conj(u[0]))).real
        )
        # trapezoid on the P1 interpolant is not exact; compare loosely and
        # compare the Hermitian structure exactly
        direct = np.trapz(integrand, x)
        assert quad == pytest.approx(direct, rel=2e-3)
        herm = (F - F.getH())
        assert abs(herm).max() < 1e-12 * abs(F).max()

    def test_homogeneity(self):
        F, M3 = None, None
        from wedgewave.pencil import assemble_quadratic_form

        F, M3 = assemble_quadratic_form(self.mat, self.k, 0.5, self.grid)
        rng = np.random.default_rng(5)
        v = rng.standard_normal(F.shape[0]) + 1j * rng.standard_normal(F.shape[0])
        q1 = (np.vdot(v, F @ v) / np.vdot(v, M3 @ v)).real
        q2 = (np.vdot(3.7 * v, F @ (3.7 * v)) / np.vdot(3.7 * v, M3 @ (3.7 * v))).real
        assert q1 == pytest.approx(q2, rel=1e-12)


class TestDispersion:
    def test_dip_matches_prediction(self):
        from wedgewave.asymptotics import predicted_decay_rate

        mat = from_poisson(0.25, 1.0)
        sol = solve_rayleigh(mat)
        k = 1.0
        grid = HalfLineGrid.uniform(3000, 30.0 / sol.kappa_t)
        delta = 1e-3
        omega2 = sol.omega_sq(k) * (1 - delta)
        loc = dispersion_dip_location(mat, k, omega2, grid)
        assert loc == pytest.approx(predicted_decay_rate(sol, k, omega2), rel=0.05)
