"""Closed symbolic family of test functions: Gaussian-polynomial products.

Each term is  coeff * prod_l q_l(u_l) exp(-u_l^2)  with u_l = scale_l * x_l
+ shift_l.  The family is closed under differentiation and dilation, which
keeps the operator-side derivative formulas exact on one side of every
finite-difference comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveScale

__all__ = [
    "Factor",
    "TestFunction",
    "gauss_product",
    "differentiate",
    "dilate",
    "l1_closed_form",
    "gauss_poly_abs_integral",
]

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Factor:
    poly: tuple  # ascending coefficients in u
    scale: float
    shift: float


def _polyval(poly, u):
    acc = np.zeros_like(u)
    for c in reversed(poly):
        acc = acc * u + c
    return acc


def _polyder(poly):
    return tuple(j * poly[j] for j in range(1, len(poly))) or (0.0,)


def _poly_times_u(poly):
    return (0.0,) + tuple(poly)


def _trim(poly):
    n = len(poly)
    while n > 1 and poly[n - 1] == 0:
        n -= 1
    return tuple(float(c) for c in poly[:n])


@dataclass(frozen=True)
class TestFunction:
    dim: int
    terms: tuple  # of (coeff, (Factor, ...))

    # -- evaluation --------------------------------------------------------

    def _points(self, x):
        pts = np.asarray(x, dtype=float)
        if self.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points must have last axis {self.dim}")
        return pts

    def __call__(self, x):
        pts = self._points(x)
        out = np.zeros(pts.shape[:-1])
        for coeff, factors in self.terms:
            acc = np.full(pts.shape[:-1], coeff)
            for l, fac in enumerate(factors):
                u = fac.scale * pts[..., l] + fac.shift
                acc = acc * _polyval(fac.poly, u) * np.exp(-u * u)
            out += acc
        return out if out.ndim else float(out)

    # -- algebra -----------------------------------------------------------

    def _canonical(terms):
        merged = {}
        for coeff, factors in terms:
            merged[factors] = merged.get(factors, 0.0) + coeff
        rows = [(c, f) for f, c in merged.items() if c != 0.0]
        rows.sort(key=lambda row: tuple(
            (fac.scale, fac.shift, fac.poly) for fac in row[1]))
        return tuple(rows)

    def __add__(self, other):
        if not isinstance(other, TestFunction) or other.dim != self.dim:
            return NotImplemented
        return TestFunction(self.dim, TestFunction._canonical(self.terms + other.terms))

    def __neg__(self):
        return self * -1.0

    def __mul__(self, scalar):
        rows = tuple((coeff * scalar, factors) for coeff, factors in self.terms)
        return TestFunction(self.dim, TestFunction._canonical(rows))

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-other)

    # -- calculus ----------------------------------------------------------

    def derivative(self, alpha):
        """Exact D^alpha; each term stays a single term."""
        if len(alpha) != self.dim:
            raise ValueError("multi-index length must equal the dimension")
        rows = []
        for coeff, factors in self.terms:
            c = coeff
            facs = list(factors)
            for l, a_l in enumerate(alpha):
                poly, lam, s = facs[l].poly, facs[l].scale, facs[l].shift
                for _ in range(a_l):
                    # d/dx q(u)e^{-u^2} = lam (q' - 2u q)(u) e^{-u^2}
                    dq = _polyder(poly)
                    uq = _poly_times_u(poly)
                    poly = _trim(tuple(
                        (dq[j] if j < len(dq) else 0.0)
                        - 2.0 * (uq[j] if j < len(uq) else 0.0)
                        for j in range(max(len(dq), len(uq)))))
                    c *= lam
                facs[l] = Factor(poly, lam, s)
            rows.append((c, tuple(facs)))
        return TestFunction(self.dim, TestFunction._canonical(rows))

    def dilate(self, lam):
        """x -> f(lam x); stays in the family (scales multiply)."""
        if lam <= 0:
            raise NonPositiveScale(f"dilation scale must be positive, got {lam}")
        rows = tuple(
            (coeff, tuple(Factor(f.poly, f.scale * lam, f.shift) for f in factors))
            for coeff, factors in self.terms)
        return TestFunction(self.dim, TestFunction._canonical(rows))

    # -- L1 norms ----------------------------------------------------------

    def l1_closed_form(self):
        """Exact L1 norm for a single term with per-axis degree <= 1 pure
        pieces (constant or monomial); None when unavailable."""
        if len(self.terms) != 1:
            return None
        coeff, factors = self.terms[0]
        value = abs(coeff)
        for fac in factors:
            poly = _trim(fac.poly)
            if len(poly) == 1:
                piece = abs(poly[0]) * SQRT_PI
            elif len(poly) == 2 and poly[0] == 0.0:
                piece = abs(poly[1])  # int |u| e^{-u^2} du = 1
            else:
                return None
            value *= piece / fac.scale
        return value

    def l1_exact(self):
        """Analytic L1 norm of any single-term function; None otherwise."""
        if len(self.terms) != 1:
            return None
        coeff, factors = self.terms[0]
        value = abs(coeff)
        for fac in factors:
            value *= gauss_poly_abs_integral(fac.poly) / fac.scale
        return value


# ---------------------------------------------------------------------------


def gauss_product(n, shifts, sign=1):
    """f(x) = sign * prod_l exp(-(x_l + s_l)^2)."""
    shifts = tuple(float(s) for s in shifts)
    if len(shifts) != n:
        raise ValueError("need one shift per dimension")
    if not all(math.isfinite(s) for s in shifts):
        raise ValueError("shifts must be finite")
    factors = tuple(Factor((1.0,), 1.0, s) for s in shifts)
    return TestFunction(n, ((float(sign), factors),))


def differentiate(f, alpha):
    return f.derivative(alpha)


def dilate(f, lam):
    return f.dilate(lam)


def l1_closed_form(f):
    return f.l1_closed_form()


# ---------------------------------------------------------------------------
# int_a^b u^j e^{-u^2} du via the erf/exp antiderivative recursion


def _monomial_cumulative(j, x):
    """F_j(x) = int_{-inf}^x u^j e^{-u^2} du."""
    if x == -math.inf:
        return 0.0
    if x == math.inf:
        if j % 2 == 1:
            return 0.0
        val = SQRT_PI
        for i in range(2, j + 1, 2):
            val *= (i - 1) / 2.0
        return val
    f_prev2 = 0.5 * SQRT_PI * (1.0 + math.erf(x))  # F_0
    if j == 0:
        return f_prev2
    f_prev1 = -0.5 * math.exp(-x * x)  # F_1
    if j == 1:
        return f_prev1
    for i in range(2, j + 1):
        f_cur = -0.5 * x ** (i - 1) * math.exp(-x * x) + 0.5 * (i - 1) * f_prev2
        f_prev2, f_prev1 = f_prev1, f_cur
    return f_cur


def _poly_gauss_integral(poly, a, b):
    return math.fsum(
        c * (_monomial_cumulative(j, b) - _monomial_cumulative(j, a))
        for j, c in enumerate(poly) if c != 0.0)


def gauss_poly_abs_integral(poly):
    """int_R |q(u)| e^{-u^2} du, splitting at the real roots of q."""
    poly = _trim(poly)
    if len(poly) == 1:
        return abs(poly[0]) * SQRT_PI
    roots = np.roots(list(reversed(poly)))
    scale = max(1.0, max(abs(r) for r in roots))
    real = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-9 * scale)
    points = [-math.inf] + real + [math.inf]
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        total += abs(_poly_gauss_integral(poly, a, b))
    return total
