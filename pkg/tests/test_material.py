import math

import numpy as np
import pytest

from wedgewave.errors import ConstraintViolation
from wedgewave.material import (
    IsotropicMaterial,
    check_rayleigh_identity,
    from_poisson,
    make_material,
    rayleigh_function,
    solve_rayleigh,
)

SIGMA_GRID = np.linspace(-0.99, 0.499, 50)


def bisect_rayleigh(mat, tol=1e-14):
    """Independent oracle: plain bisection of the secular function, no polish."""
    lo, hi = 1e-4 * mat.c_t, mat.c_t * (1 - 1e-14)
    assert rayleigh_function(mat, lo) < 0 < rayleigh_function(mat, hi)
    while hi - lo > tol * mat.c_t:
        mid = 0.5 * (lo + hi)
        if rayleigh_function(mat, mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_make_material_examples():
    m = make_material(1.0, 1.0)
    assert m.poisson == pytest.approx(0.25, abs=1e-15)
    assert m.c_t == 1.0
    assert m.c_l == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert make_material(0.0, 1.0).poisson == 0.0
    with pytest.raises(ConstraintViolation, match="mu"):
        make_material(1.0, 0.0)
    with pytest.raises(ConstraintViolation, match="lam"):
        make_material(-1.0, 1.0)


def test_from_poisson_examples():
    assert from_poisson(0.25, 1.0).lam == pytest.approx(1.0, abs=1e-15)
    assert from_poisson(0.0, 2.0).lam == 0.0
    for bad in (0.5, -1.0, 0.7, -1.3):
        with pytest.raises(ConstraintViolation):
            from_poisson(bad, 1.0)


@pytest.mark.parametrize("sigma", [-0.9, -0.5, 0.0, 0.25, 0.4, 0.49])
def test_round_trip_poisson(sigma):
    mat = from_poisson(sigma, 1.7)
    assert mat.poisson == pytest.approx(sigma, abs=1e-15)


def test_solve_rayleigh_against_bisection_oracle():
    for lam, mu, ratio in ((1.0, 1.0, 0.9194), (0.0, 1.0, 0.8740)):
        mat = make_material(lam, mu)
        sol = solve_rayleigh(mat)
        assert sol.c_R / mat.c_t == pytest.approx(ratio, abs=5e-5)
        assert sol.c_R == pytest.approx(bisect_rayleigh(mat), rel=1e-13)
        assert abs(rayleigh_function(mat, sol.c_R)) < 1e-12


@pytest.mark.parametrize("sigma", SIGMA_GRID)
def test_identity_and_range_on_grid(sigma):
    sol = solve_rayleigh(from_poisson(sigma, 1.0))
    assert 0.0 < sol.B < 1.0
    assert check_rayleigh_identity(sol) < 1e-12
    B = sol.B
    assert 16 - 24 * B + 8 * B**2 - B**3 > 0


@pytest.mark.parametrize("scale", [1e-3, 1.0, 1e3])
def test_scale_invariance(scale):
    base = solve_rayleigh(make_material(1.2, 0.8))
    scaled = solve_rayleigh(make_material(1.2 * scale, 0.8 * scale))
    assert scaled.B == pytest.approx(base.B, rel=1e-13)
    assert scaled.kappa_t == pytest.approx(base.kappa_t, rel=1e-13)
    assert scaled.kappa_l == pytest.approx(base.kappa_l, rel=1e-13)


@pytest.mark.parametrize("sigma", SIGMA_GRID[::7])
def test_bracketing(sigma):
    mat = from_poisson(sigma, 1.0)
    assert rayleigh_function(mat, 1e-4 * mat.c_t) < 0
    assert rayleigh_function(mat, mat.c_t * (1 - 1e-14)) > 0


def test_rho_fixed():
    with pytest.raises(ConstraintViolation, match="rho"):
        IsotropicMaterial(lam=1.0, mu=1.0, rho=2.0)
