"""The Rayleigh surface mode, its linear-growth partner, and their stresses.

Fields here are three-component displacements on the half-plane x2 >= 0 of the
form  u_j(x1, x2) = a_j(x2) + x1 * b_j(x2)  with exponential-sum profiles, and
an implicit factor exp(i*k*x3) so that d/dx3 acts as multiplication by i*k.

Two concrete fields are provided:

* ``build_uR`` -- the Rayleigh wave (0, u2, u3) with two decay rates k*kappa_l
  and k*kappa_t per component and unit amplitude;
* ``build_vR`` -- the linear-growth solution
  (-i/k * u3(x2), x1*u2(x2), x1*u3(x2)) that pairs with the Rayleigh wave in
  the Green's-formula extraction of matching constants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expsum import ExpSum, integrate_halfline
from .material import IsotropicMaterial, RayleighSolution

__all__ = ["ModeField", "build_uR", "build_vR", "stress", "norm_U0_sq"]

_ZERO = ExpSum.zero()
_ZEROS = (_ZERO, _ZERO, _ZERO)


@dataclass(frozen=True)
class ModeField:
    """Displacement field affine in x1 with ExpSum profiles in x2."""

    base: tuple[ExpSum, ExpSum, ExpSum]
    slope: tuple[ExpSum, ExpSum, ExpSum]
    k: float
    material: IsotropicMaterial

    def profile(self, at_x1: float = 0.0) -> tuple[ExpSum, ExpSum, ExpSum]:
        """Components as ExpSums in x2 on the vertical line x1 = at_x1."""
        return tuple(a + at_x1 * b for a, b in zip(self.base, self.slope))

    def d1(self) -> "ModeField":
        """Exact d/dx1 (the affine part drops to the base)."""
        return ModeField(base=self.slope, slope=_ZEROS, k=self.k, material=self.material)

    def d2(self) -> "ModeField":
        """Exact d/dx2, componentwise on both profiles."""
        return ModeField(
            base=tuple(a.derivative() for a in self.base),
            slope=tuple(b.derivative() for b in self.slope),
            k=self.k,
            material=self.material,
        )

    def d3(self) -> "ModeField":
        """d/dx3 is multiplication by i*k for a single travelling harmonic."""
        ik = 1j * self.k
        return ModeField(
            base=tuple(ik * a for a in self.base),
            slope=tuple(ik * b for b in self.slope),
            k=self.k,
            material=self.material,
        )

    def scaled(self, factor: complex) -> "ModeField":
        return ModeField(
            base=tuple(factor * a for a in self.base),
            slope=tuple(factor * b for b in self.slope),
            k=self.k,
            material=self.material,
        )


def build_uR(sol: RayleighSolution, k: float, amplitude: complex = 1.0) -> ModeField:
    """Rayleigh wave profile (0, u2, u3) for wavenumber ``k``, unit amplitude by default.

    u2(x2) = i*A*kappa_l*(exp(-k*kappa_l*x2) - 2/(1+kappa_t^2)*exp(-k*kappa_t*x2))
    u3(x2) =      A     *(exp(-k*kappa_l*x2) - 2*kappa_l*kappa_t/(1+kappa_t^2)*exp(-k*kappa_t*x2))
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    kt = sol.kappa_t
    kl = sol.kappa_l
    c = 2.0 / (1.0 + kt**2)
    u2 = ExpSum(
        [
            (1j * amplitude * kl, 0, k * kl),
            (-1j * amplitude * kl * c, 0, k * kt),
        ]
    )
    u3 = ExpSum(
        [
            (amplitude, 0, k * kl),
            (-amplitude * kl * kt * c, 0, k * kt),
        ]
    )
    return ModeField(base=(_ZERO, u2, u3), slope=_ZEROS, k=k, material=sol.material)


def build_vR(sol: RayleighSolution, k: float, amplitude: complex = 1.0) -> ModeField:
    """Linear-growth partner (-i/k*u3(x2), x1*u2(x2), x1*u3(x2)) of the Rayleigh wave."""
    uR = build_uR(sol, k, amplitude)
    u2, u3 = uR.base[1], uR.base[2]
    return ModeField(
        base=((-1j / k) * u3, _ZERO, _ZERO),
        slope=(_ZERO, u2, u3),
        k=k,
        material=sol.material,
    )


def _gradient(field: ModeField) -> tuple[ModeField, ModeField, ModeField]:
    return field.d1(), field.d2(), field.d3()


def stress(field: ModeField, n: int, m: int, at_x1: float = 0.0) -> ExpSum:
    """Stress component sigma_nm[field] on the line x1 = at_x1, as an ExpSum in x2.

    sigma_nm = lam * div(u) * delta_nm + mu * (d_m u_n + d_n u_m), with d3 = i*k.
    Symmetric in (n, m) by construction.  Indices are 1-based.
    """
    if n not in (1, 2, 3) or m not in (1, 2, 3):
        raise ValueError(f"stress indices must be in 1..3, got ({n}, {m})")
    lam = field.material.lam
    mu = field.material.mu
    grads = _gradient(field)
    dm_un = grads[m - 1]
    dn_um = grads[n - 1]
    term = mu * (
        (dm_un.base[n - 1] + at_x1 * dm_un.slope[n - 1])
        + (dn_um.base[m - 1] + at_x1 * dn_um.slope[m - 1])
    )
    if n == m:
        div_base = grads[0].base[0] + grads[1].base[1] + grads[2].base[2]
        div_slope = grads[0].slope[0] + grads[1].slope[1] + grads[2].slope[2]
        term = term + lam * (div_base + at_x1 * div_slope)
    return term


def norm_U0_sq(sol: RayleighSolution, k: float) -> float:
    """Squared L2(0, inf) norm of the unit-amplitude Rayleigh profile, closed form.

    Equals the exact integral of |u2|^2 + |u3|^2; the agreement of the two
    routes is asserted in the test suite at 1e-12 relative.
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    B = sol.B
    return B**2 * ((1.0 - B) ** 2 * (7.0 - 2.0 * B) + 1.0) / (
        8.0 * k * (1.0 - B) ** 1.5 * (2.0 - B) ** 2
    )


def mode_norm_sq_exact(field: ModeField, at_x1: float = 0.0) -> float:
    """Exact |field|^2 integral over x2 in (0, inf) on a vertical line."""
    comps = field.profile(at_x1)
    total = _ZERO
    for c in comps:
        total = total + c.abs_squared()
    return float(integrate_halfline(total).real)
