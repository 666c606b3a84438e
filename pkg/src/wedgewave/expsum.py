"""Exact calculus for finite sums of coeff * x^p * exp(-rate*x) on [0, inf).

Surface-wave profiles and everything derived from them (stresses, pairings,
norms) stay inside this class of functions, so sums, products, derivatives and
half-line integrals can be carried out exactly:

    integral_0^inf x^p exp(-a x) dx = p! / a^(p+1),   a > 0.

A composite Gauss-Legendre quadrature over a truncated interval is provided as
an independent numerical cross-check of the exact integral.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import NotIntegrable

__all__ = ["ExpSum", "integrate_halfline", "integrate_halfline_quadrature"]


def _merge(terms) -> tuple:
    by_key: dict[tuple[int, float], complex] = {}
    for coeff, power, rate in terms:
        key = (power, rate)
        by_key[key] = by_key.get(key, 0.0) + coeff
    out = [
        (c, p, r)
        for (p, r), c in sorted(by_key.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        if c != 0
    ]
    return tuple(out)


class ExpSum:
    """Immutable finite sum of terms coeff * x^power * exp(-rate*x)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[complex, int, float]] = ()):
        checked = []
        for coeff, power, rate in terms:
            power = int(power)
            rate = float(rate)
            if power < 0:
                raise ValueError(f"power must be >= 0, got {power}")
            if rate < 0:
                raise ValueError(f"rate must be >= 0, got {rate}")
            checked.append((complex(coeff), power, rate))
        object.__setattr__(self, "terms", _merge(checked))

    def __setattr__(self, name, value):
        raise AttributeError("ExpSum is immutable")

    @classmethod
    def zero(cls) -> "ExpSum":
        return cls(())

    @classmethod
    def exponential(cls, coeff: complex, rate: float, power: int = 0) -> "ExpSum":
        """Single term coeff * x^power * exp(-rate*x)."""
        return cls(((coeff, power, rate),))

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(self.terms + other.terms)

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-1.0) * other

    def __neg__(self) -> "ExpSum":
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, ExpSum):
            return ExpSum(
                (ca * cb, pa + pb, ra + rb)
                for ca, pa, ra in self.terms
                for cb, pb, rb in other.terms
            )
        return ExpSum((c * other, p, r) for c, p, r in self.terms)

    def __rmul__(self, scalar) -> "ExpSum":
        return self.__mul__(scalar)

    def derivative(self) -> "ExpSum":
        """Exact d/dx."""
        out = []
        for c, p, r in self.terms:
            if p > 0:
                out.append((c * p, p - 1, r))
            out.append((-c * r, p, r))
        return ExpSum(out)

    def conjugate(self) -> "ExpSum":
        return ExpSum((np.conj(c), p, r) for c, p, r in self.terms)

    def abs_squared(self) -> "ExpSum":
        """Pointwise |f(x)|^2 as an ExpSum (valid on the real half-line)."""
        return self * self.conjugate()

    def evaluate(self, x):
        """Evaluate at a scalar or ndarray of points."""
        x = np.asarray(x, dtype=float)
        acc = np.zeros(x.shape, dtype=complex)
        for c, p, r in self.terms:
            acc += c * x**p * np.exp(-r * x)
        return acc if acc.shape else acc[()]

    def max_coeff(self) -> float:
        """Largest coefficient magnitude after merging; zero-ness measure."""
        return max((abs(c) for c, _, _ in self.terms), default=0.0)

    def min_rate(self) -> float:
        return min((r for _, _, r in self.terms), default=np.inf)

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*x^{p}*exp(-{r:.6g}x)" for c, p, r in self.terms)
        return f"ExpSum[{body or '0'}]"


def integrate_halfline(s: ExpSum) -> complex:
    """Exact integral of ``s`` over (0, inf); every term must decay."""
    total = 0.0 + 0.0j
    for c, p, r in s.terms:
        if r <= 0.0:
            raise NotIntegrable(f"term with rate {r} and power {p} is not integrable")
        total += c * float(math.factorial(p)) / r ** (p + 1)
    return total


def integrate_halfline_quadrature(
    s: ExpSum, x_max: float | None = None, panels: int = 200, order: int = 12
) -> complex:
    """Composite Gauss-Legendre integral of ``s`` on (0, x_max).

    Independent of the exact factorial formula; used to cross-check it.  The
    default truncation covers 40 e-folds of the slowest decaying term.
    """
    if x_max is None:
        slowest = s.min_rate()
        if not np.isfinite(slowest) or slowest <= 0.0:
            raise NotIntegrable("quadrature truncation needs a positive slowest rate")
        x_max = 40.0 / slowest
    pts, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, x_max, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * pts[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    return complex(np.sum(w * s.evaluate(x)))
