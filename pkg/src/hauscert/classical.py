"""Hardy and adjoint-Hardy operators: closed forms, Hausdorff instances and
the bounded/unbounded dichotomy table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certifier import Certificate, certify
from .errors import DivergentTail, NonPositivePoint
from .exprcfg import parse_expr
from .hausdorff import Interval, KernelSpec, apply_point
from .matrices import DiagonalInverseNorm
from .quadrature import Status, integrate_line

__all__ = [
    "ClassicalOp",
    "hardy_kernel",
    "adjoint_hardy_kernel",
    "hardy_point",
    "adjoint_hardy_point",
    "hausdorff_equivalence_check",
    "proposition_report",
]


def hardy_kernel():
    """Psi(t) = chi_(1,inf)(t) / t^2; H_Psi is the Hardy operator."""
    return KernelSpec(1, parse_expr("chi(1,inf)(y1)/y1^2", 1),
                      Interval(1.0, math.inf), singularities=("infinity",))


def adjoint_hardy_kernel():
    """Psi*(t) = chi_(0,1)(t) / t; H_Psi* is the adjoint Hardy operator."""
    return KernelSpec(1, parse_expr("chi(0,1)(y1)/y1", 1),
                      Interval(0.0, 1.0), singularities=("origin",))


@dataclass(frozen=True)
class ClassicalOp:
    which: str  # "hardy" | "adjoint-hardy"

    @property
    def kernel(self):
        if self.which == "hardy":
            return hardy_kernel()
        if self.which == "adjoint-hardy":
            return adjoint_hardy_kernel()
        raise ValueError(f"unknown operator {self.which!r}")

    def closed_form(self, f, x, tol=1e-9):
        if self.which == "hardy":
            return hardy_point(f, x, tol)
        return adjoint_hardy_point(f, x, tol)


def hardy_point(f, x, tol=1e-9):
    """H f(x) = (1/x) int_0^x f(t) dt for x > 0."""
    if x <= 0:
        raise NonPositivePoint("Hardy closed form requires x > 0")
    return integrate_line(f, 0.0, x, tol=tol).value / x


def adjoint_hardy_point(f, x, tol=1e-9):
    """H* f(x) = int_x^inf f(t)/t dt for x > 0."""
    if x <= 0:
        raise NonPositivePoint("adjoint Hardy closed form requires x > 0")
    r = integrate_line(lambda t: f(t) / t, x, math.inf, tol=tol)
    if r.status is not Status.CONVERGED:
        raise DivergentTail("tail integral of f(t)/t did not converge")
    return r.value


def hausdorff_equivalence_check(which, f, points, tol=1e-9):
    """max |apply_point - closed form| over the given positive points."""
    op = ClassicalOp(which)
    kernel = op.kernel
    fam = DiagonalInverseNorm(1)
    worst = 0.0
    for x in points:
        if x <= 0:
            raise NonPositivePoint("equivalence holds on the half-line x > 0")
        lhs = apply_point(kernel, fam, lambda p: f(float(np.atleast_1d(p)[0])),
                          np.array([x]), tol=tol).value
        rhs = op.closed_form(f, x, tol)
        worst = max(worst, abs(lhs - rhs))
    return worst


def proposition_report(k_max, tol=1e-7):
    """Certify (Psi, k) and (Psi*, k) for k = 0..k_max.

    Expected dichotomy: Hardy unbounded for every k; adjoint Hardy bounded
    at k = 0 only.
    """
    fam = DiagonalInverseNorm(1)
    rows = []
    for which, kernel in (("hardy", hardy_kernel()),
                          ("adjoint-hardy", adjoint_hardy_kernel())):
        for k in range(k_max + 1):
            cert: Certificate = certify(kernel, fam, k, tol=tol)
            row = {"operator": which, "k": k, "verdict": cert.verdict}
            if cert.verdict == "bounded":
                row["constant"] = cert.constant
                row["order_breakdown"] = [b.value for b in cert.evidence.breakdown]
            elif cert.evidence is not None and cert.evidence.quad.evidence:
                row["growth"] = cert.evidence.quad.evidence.law
            rows.append(row)
    return rows
