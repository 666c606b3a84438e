"""Matching constants and the leading wedge-speed correction.

The near-flat wedge perturbs the Rayleigh cutoff downward.  The chain computed
here is

    xi1     = -cv_plus                       (outer decay slope, > 0)
    lambda1 = |b| * cv_plus^2 / ||U0||^2     (eigenvalue correction, > 0)
    theta   = lambda1 / (c_R^2 k^2)          (dimensionless, function of the
                                              Poisson ratio only)
    c_w^2   = c_R^2 (1 - eps^2 * theta)      (two-term speed law)

with b the pencil obstruction coefficient and cv_plus a ratio of two
Green's-formula pairings of the Rayleigh wave u^R with its linear-growth
partner v^R across the line x1 = 0:

    cv_plus = int [ s22[u]conj(u2) + s32[u]conj(u3) - u2 conj(s11[u]) ]
            / int [ s21[v]conj(u2) + s31[v]conj(u3) - v1 conj(s11[u]) ].

Each constant is available both through the exact exponential-sum integrals
and through its closed form in B = c_R^2/c_t^2; the two routes agree to near
machine precision and the disagreement is carried as a provenance diagnostic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AboveCutoff, DegenerateDenominator
from .expsum import ExpSum, integrate_halfline
from .material import RayleighSolution
from .mode import ModeField, build_uR, build_vR, mode_norm_sq_exact, norm_U0_sq, stress
from .pencil import compute_b_closed, compute_b_quadrature

__all__ = [
    "AsymptoticCoefficients",
    "compute_cv_plus",
    "compute_cv_plus_closed",
    "compute_cu_plus",
    "compute_lambda1",
    "compute_theta",
    "compute_coefficients",
    "wedge_speed_sq",
    "predicted_decay_rate",
]


def green_pairing_ratio(
    sol: RayleighSolution, k: float, pairing: ModeField, amplitude: complex = 1.0
) -> complex:
    """Ratio of jump data to growth pairing against the field ``pairing``.

    Numerator: the x1 = 0 jump sources (tractions of u^R through the vertical
    line and the displacement jump they induce) paired with ``pairing``.
    Denominator: the symplectic pairing, across a vertical line, of the
    complementary growth field with ``pairing``.  With pairing = u^R this is
    the matching constant cv_plus; with pairing = v^R it is cu_plus.
    """
    uR = build_uR(sol, k, amplitude)
    vR = build_vR(sol, k, amplitude)
    is_u = pairing.slope[1].max_coeff() == 0.0  # u^R has no linear growth
    partner = vR if is_u else uR
    z = pairing.profile(0.0)

    num = ExpSum.zero()
    for n in (1, 2, 3):
        num = num + stress(uR, n, 2, 0.0) * z[n - 1].conjugate()
    num = num - uR.base[1] * stress(pairing, 1, 1, 0.0).conjugate()

    den = ExpSum.zero()
    p = partner.profile(0.0)
    for n in (1, 2, 3):
        den = den + stress(partner, n, 1, 0.0) * z[n - 1].conjugate()
        den = den - p[n - 1] * stress(pairing, n, 1, 0.0).conjugate()

    num_val = integrate_halfline(num)
    den_val = integrate_halfline(den)
    if abs(den_val) < 1e-14:
        raise DegenerateDenominator(
            f"pairing denominator {den_val} for poisson = {sol.material.poisson}"
        )
    return num_val / den_val


def compute_cv_plus(sol: RayleighSolution, k: float, amplitude: complex = 1.0) -> complex:
    """Matching constant of the linear-growth field, by exact integration.

    Real and strictly negative; the imaginary part is a rounding residual.
    """
    return green_pairing_ratio(sol, k, build_uR(sol, k, amplitude), amplitude)


def compute_cv_plus_closed(sol: RayleighSolution, k: float) -> float:
    """Closed form of the matching constant in B = c_R^2/c_t^2.

    cv_plus = -k sqrt(1-B) (4-B)(2-B)^2 (8(1-B)^2 + B^2(2-B))
              / (2B (8(1-B) + B^2) (8(1-B)^2 + B^2(3-2B)))
    """
    B = sol.B
    num = (
        k
        * math.sqrt(1.0 - B)
        * (4.0 - B)
        * (2.0 - B) ** 2
        * (8.0 * (1.0 - B) ** 2 + B**2 * (2.0 - B))
    )
    den = 2.0 * B * (8.0 * (1.0 - B) + B**2) * (8.0 * (1.0 - B) ** 2 + B**2 * (3.0 - 2.0 * B))
    return -num / den


def compute_cu_plus(sol: RayleighSolution, k: float, amplitude: complex = 1.0) -> complex:
    """Matching constant of the bounded field; vanishes identically (checked to rounding)."""
    return green_pairing_ratio(sol, k, build_vR(sol, k, amplitude), amplitude)


def compute_lambda1(
    sol: RayleighSolution, k: float, method: str = "closed-form", amplitude: complex = 1.0
) -> float:
    """Leading eigenvalue correction |b| cv_plus^2 / ||U0||^2 (> 0).

    ``method`` selects the provenance of all three ingredients:
    "closed-form" evaluates the explicit formulas in B, "quadrature" uses the
    exact exponential-sum integrals.
    """
    if method == "closed-form":
        b = compute_b_closed(sol, k)
        cv = compute_cv_plus_closed(sol, k)
        nrm = norm_U0_sq(sol, k)
    elif method == "quadrature":
        b = compute_b_quadrature(sol, k, amplitude).real
        cv = compute_cv_plus(sol, k, amplitude).real
        nrm = mode_norm_sq_exact(build_uR(sol, k, amplitude))
    else:
        raise ValueError(f"unknown method {method!r}")
    return abs(b) * cv**2 / nrm


def compute_theta(sol: RayleighSolution) -> float:
    """Dimensionless speed-deficit coefficient lambda1 / (c_R k)^2.

    Depends on the Poisson ratio only; evaluated at the canonical
    normalization k = 1 (the k-dependences of the three factors cancel).
    """
    k = 1.0
    return compute_lambda1(sol, k) / sol.omega_sq(k)


def wedge_speed_sq(sol: RayleighSolution, eps: float) -> float:
    """Two-term wedge speed law c_R^2 (1 - eps^2 theta), without the remainder."""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    if eps > 0.3:
        warnings.warn(
            f"eps = {eps} is outside the small-angle regime; the two-term law degrades",
            stacklevel=2,
        )
    return sol.c_R**2 * (1.0 - eps**2 * compute_theta(sol))


def predicted_decay_rate(sol: RayleighSolution, k: float, omega_sq: float) -> float:
    """Leading real decay rate of the outer waves below the cutoff.

    xi = sqrt((omega_R^2 - omega_sq) ||U0||^2 / |b|); raises AboveCutoff when
    omega_sq >= omega_R^2.
    """
    cutoff = sol.omega_sq(k)
    if omega_sq >= cutoff:
        raise AboveCutoff(f"omega_sq = {omega_sq} is not below the cutoff {cutoff}")
    return math.sqrt((cutoff - omega_sq) * norm_U0_sq(sol, k) / abs(compute_b_closed(sol, k)))


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """All matching constants for one material and wavenumber, with provenance."""

    k: float
    b: float
    cv_plus: float
    cu_plus: float
    xi1: float
    lambda1: float
    theta: float
    provenance: dict = field(default_factory=dict)
    disagreement: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.b < 0 and self.cv_plus < 0 and self.xi1 > 0 and self.lambda1 > 0 and self.theta > 0):
            raise AssertionError(
                "sign pattern violated: expected b < 0, cv_plus < 0, xi1 > 0, "
                f"lambda1 > 0, theta > 0, got {self}"
            )


def compute_coefficients(sol: RayleighSolution, k: float) -> AsymptoticCoefficients:
    """Closed-form coefficients cross-checked against the exact-integral route.

    The ``disagreement`` map records the relative gap between the two routes
    for b, cv_plus, and lambda1 (and the absolute magnitude for cu_plus, whose
    reference value is zero).
    """
    b_c = compute_b_closed(sol, k)
    cv_c = compute_cv_plus_closed(sol, k)
    b_q = compute_b_quadrature(sol, k)
    cv_q = compute_cv_plus(sol, k)
    cu_q = compute_cu_plus(sol, k)
    lam1_c = compute_lambda1(sol, k, "closed-form")
    lam1_q = compute_lambda1(sol, k, "quadrature")
    theta = compute_theta(sol)
    return AsymptoticCoefficients(
        k=k,
        b=b_c,
        cv_plus=cv_c,
        cu_plus=abs(cu_q),
        xi1=-cv_c,
        lambda1=lam1_c,
        theta=theta,
        provenance={
            "b": "closed-form",
            "cv_plus": "closed-form",
            "cu_plus": "quadrature",
            "xi1": "closed-form",
            "lambda1": "closed-form",
            "theta": "closed-form",
        },
        disagreement={
            "b": abs(b_q.real - b_c) / abs(b_c),
            "cv_plus": abs(cv_q.real - cv_c) / abs(cv_c),
            "cu_plus": abs(cu_q),
            "lambda1": abs(lam1_q - lam1_c) / abs(lam1_c),
        },
    )
