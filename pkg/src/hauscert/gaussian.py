"""Gaussian-derivative polynomials, shift thresholds and witness functions.

With g(t) = exp(-t^2), the m-th derivative is g^(m)(t) = P_m(t) g(t) where
the P_m follow the recursion P_m = P_{m-1}' - 2t P_{m-1}, P_0 = 1.  The
leading coefficient of P_m is (-1)^m 2^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import OrderMismatch, OrderTooLarge

__all__ = [
    "HermiteFactor",
    "WitnessFunction",
    "hermite_factor_seq",
    "shift_threshold",
    "witness_derivative",
]

_MAX_ORDER = 60


@dataclass(frozen=True)
class HermiteFactor:
    """P_m held with exact integer coefficients, coeffs[j] multiplying t^j."""

    order: int
    coeffs: tuple  # of int

    def __call__(self, t):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


def hermite_factor_seq(m):
    """P_0 .. P_m via the recursion; exact integer arithmetic."""
    if m > _MAX_ORDER:
        raise OrderTooLarge(f"order {m} > {_MAX_ORDER}: coefficients overflow doubles")
    if m < 0:
        raise ValueError("order must be >= 0")
    seq = [HermiteFactor(0, (1,))]
    coeffs = [1]
    for order in range(1, m + 1):
        deriv = [j * coeffs[j] for j in range(1, len(coeffs))]
        shifted = [0] + [-2 * c for c in coeffs]  # -2t * P
        nxt = [0] * (order + 1)
        for j, c in enumerate(deriv):
            nxt[j] += c
        for j, c in enumerate(shifted):
            nxt[j] += c
        coeffs = nxt
        seq.append(HermiteFactor(order, tuple(coeffs)))
    return seq


def _largest_positive_root(poly, scan_step=1e-3, bisect_tol=1e-12):
    """Largest positive root of the polynomial (coeff list, ascending)."""
    deg = max(j for j, c in enumerate(poly) if c != 0)
    lead = poly[deg]
    cauchy = 1.0 + max(abs(c / lead) for c in poly[:deg]) if deg > 0 else 0.0

    def p(t):
        acc = 0.0
        for c in reversed(poly):
            acc = acc * t + c
        return acc

    hi = cauchy + scan_step
    steps = int(math.ceil(hi / scan_step))
    prev_t, prev_v = 0.0, p(0.0)
    best = None
    for i in range(1, steps + 1):
        t = min(i * scan_step, hi)
        v = p(t)
        if v == 0.0:
            best = t
        elif prev_v * v < 0.0:
            a, b, fa = prev_t, t, prev_v
            while b - a > bisect_tol:
                mid = 0.5 * (a + b)
                fm = p(mid)
                if fm == 0.0:
                    a = b = mid
                elif fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            best = 0.5 * (a + b)
        prev_t, prev_v = t, v
    return best


@lru_cache(maxsize=None)
def shift_threshold(m):
    """a_m: the largest positive root of (-1)^i P_i - 1 over i = 1..m, else 0."""
    if m < 1:
        raise ValueError("order must be >= 1")
    seq = hermite_factor_seq(m)
    best = 0.0
    for i in range(1, m + 1):
        sign = -1 if i % 2 else 1
        poly = [sign * c for c in seq[i].coeffs]
        poly[0] -= 1
        root = _largest_positive_root(poly)
        if root is not None and root > best:
            best = root
    return best


@dataclass(frozen=True)
class WitnessFunction:
    """G_m(x) = (-1)^m prod_l g(x_l + a_m), the necessity-proof witness."""

    order: int
    dim: int
    shift: float = field(init=False)
    sign: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "shift", shift_threshold(self.order))
        object.__setattr__(self, "sign", -1 if self.order % 2 else 1)

    def __call__(self, x):
        try:
            point = [float(v) for v in x]
        except TypeError:
            point = [float(x)]
        acc = float(self.sign)
        for v in point:
            acc *= math.exp(-(v + self.shift) ** 2)
        return acc

    def as_test_function(self):
        from .testfuncs import gauss_product

        return gauss_product(self.dim, (self.shift,) * self.dim, self.sign)


def witness_derivative(w, gamma, x):
    """Exact D^gamma G_m at x via the P factors.

    For x in the open positive orthant and |gamma| = m the value is
    >= prod_l g(x_l + a_m) > 0.
    """
    if len(gamma) != w.dim:
        raise ValueError("multi-index length must equal the dimension")
    if any(g > w.order for g in gamma):
        raise OrderMismatch(
            f"component order exceeds witness order {w.order}; shift only covers i <= m"
        )
    try:
        point = [float(v) for v in x]
    except TypeError:
        point = [float(x)]
    seq = hermite_factor_seq(max(gamma) if gamma else 0)
    acc = float(w.sign)
    for g, v in zip(gamma, point):
        t = v + w.shift
        acc *= seq[g](t) * math.exp(-t * t)
    return acc
