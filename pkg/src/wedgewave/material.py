"""Isotropic material data and a certified Rayleigh wave speed solver.

Speeds are in units with unit density: the transverse and longitudinal bulk
speeds are c_t = sqrt(mu) and c_l = sqrt(lam + 2*mu).  The Rayleigh speed is
the root of the classical secular function

    R(c) = (2 - c^2/c_t^2)^2 - 4*sqrt(1 - c^2/c_l^2)*sqrt(1 - c^2/c_t^2)

on (0, c_t), found by bisection and polished with Newton steps.  Every root is
certified afterwards against the cubic identity

    16 - 24 B + 8 B^2 - B^3 = 16 (c_t^2 - c_R^2) / c_l^2,   B = c_R^2 / c_t^2,

which must hold to near machine precision for a genuine Rayleigh root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstraintViolation, RootBracketFailure

__all__ = [
    "IsotropicMaterial",
    "RayleighSolution",
    "make_material",
    "from_poisson",
    "solve_rayleigh",
    "check_rayleigh_identity",
    "rayleigh_function",
]


@dataclass(frozen=True)
class IsotropicMaterial:
    """Lame constants of an isotropic solid; density is fixed to one."""

    lam: float
    mu: float
    rho: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ConstraintViolation(f"mu > 0 violated: mu = {self.mu}")
        if not self.lam + (2.0 / 3.0) * self.mu > 0:
            raise ConstraintViolation(
                f"lam + (2/3)*mu > 0 violated: lam = {self.lam}, mu = {self.mu}"
            )
        if self.rho != 1.0:
            raise ConstraintViolation(f"rho is fixed to 1, got {self.rho}")

    @property
    def poisson(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))

    @property
    def c_t(self) -> float:
        """Transverse bulk speed sqrt(mu)."""
        return math.sqrt(self.mu)

    @property
    def c_l(self) -> float:
        """Longitudinal bulk speed sqrt(lam + 2 mu)."""
        return math.sqrt(self.lam + 2.0 * self.mu)


@dataclass(frozen=True)
class RayleighSolution:
    """A material together with its certified Rayleigh speed."""

    material: IsotropicMaterial
    c_R: float

    def __post_init__(self):
        if not 0.0 < self.c_R < self.material.c_t:
            raise ConstraintViolation(
                f"0 < c_R < c_t violated: c_R = {self.c_R}, c_t = {self.material.c_t}"
            )

    @property
    def B(self) -> float:
        """Dimensionless squared speed ratio c_R^2/c_t^2, in (0, 1)."""
        return self.c_R**2 / self.material.mu

    @property
    def kappa_t(self) -> float:
        """Transverse decay constant sqrt(1 - c_R^2/c_t^2)."""
        return math.sqrt(1.0 - self.c_R**2 / self.material.mu)

    @property
    def kappa_l(self) -> float:
        """Longitudinal decay constant sqrt(1 - c_R^2/c_l^2)."""
        return math.sqrt(1.0 - self.c_R**2 / self.material.c_l**2)

    def omega_sq(self, k: float) -> float:
        """Cutoff frequency squared c_R^2 k^2 for wavenumber ``k``."""
        return self.c_R**2 * k**2


def make_material(lam: float, mu: float) -> IsotropicMaterial:
    """Build a material from Lame constants, validating admissibility."""
    return IsotropicMaterial(lam=float(lam), mu=float(mu))


def from_poisson(poisson: float, mu: float) -> IsotropicMaterial:
    """Build a material from Poisson ratio (open interval (-1, 1/2)) and shear modulus."""
    if not -1.0 < poisson < 0.5:
        raise ConstraintViolation(f"poisson must lie in (-1, 1/2), got {poisson}")
    if not mu > 0:
        raise ConstraintViolation(f"mu > 0 violated: mu = {mu}")
    lam = 2.0 * mu * poisson / (1.0 - 2.0 * poisson)
    return IsotropicMaterial(lam=lam, mu=float(mu))


def rayleigh_function(mat: IsotropicMaterial, c: float) -> float:
    """Secular function R(c); its unique root in (0, c_t) is the Rayleigh speed."""
    st = c * c / mat.mu
    sl = c * c / (mat.lam + 2.0 * mat.mu)
    if st >= 1.0 or sl >= 1.0:
        raise ConstraintViolation(f"R(c) requires 0 <= c < c_t, got c = {c}")
    return (2.0 - st) ** 2 - 4.0 * math.sqrt(1.0 - sl) * math.sqrt(1.0 - st)


def _rayleigh_function_derivative(mat: IsotropicMaterial, c: float) -> float:
    ct2 = mat.mu
    cl2 = mat.lam + 2.0 * mat.mu
    st = c * c / ct2
    sl = c * c / cl2
    rt = math.sqrt(1.0 - st)
    rl = math.sqrt(1.0 - sl)
    return (
        -4.0 * c / ct2 * (2.0 - st)
        + 4.0 * c / cl2 * rt / rl
        + 4.0 * c / ct2 * rl / rt
    )


def solve_rayleigh(mat: IsotropicMaterial) -> RayleighSolution:
    """Find the Rayleigh speed of ``mat``.

    Bisection on (0, c_t) to machine width guarantees bracketing; two Newton
    steps restore full floating-point accuracy.  Raises RootBracketFailure if
    the secular function does not change sign (cannot happen for admissible
    Poisson ratios).
    """
    ct = mat.c_t
    # R has a spurious root at c = 0; start the bracket off zero where the
    # O(c^2) negative dip is representable.
    lo, hi = 1e-4 * ct, ct * (1.0 - 1e-14)
    f_lo = rayleigh_function(mat, lo)
    f_hi = rayleigh_function(mat, hi)
    if not (f_lo < 0.0 < f_hi):
        raise RootBracketFailure(
            f"no sign change of R on (0, c_t) for poisson = {mat.poisson}: "
            f"R(lo) = {f_lo}, R(hi) = {f_hi}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if rayleigh_function(mat, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    for _ in range(2):
        step = rayleigh_function(mat, c) / _rayleigh_function_derivative(mat, c)
        c_new = c - step
        if 0.0 < c_new < ct:
            c = c_new
    return RayleighSolution(material=mat, c_R=c)


def check_rayleigh_identity(sol: RayleighSolution) -> float:
    """Relative residual of the cubic identity certifying the Rayleigh root."""
    B = sol.B
    lhs = 16.0 - 24.0 * B + 8.0 * B**2 - B**3
    mat = sol.material
    rhs = 16.0 * (mat.mu - sol.c_R**2) / (mat.lam + 2.0 * mat.mu)
    return abs(lhs - rhs) / abs(rhs)
