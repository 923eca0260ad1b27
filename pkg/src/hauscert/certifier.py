"""W^{k,1} norms, interchange verification, the boundedness certificate and
the blow-up growth table."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, PreconditionUnmet
from .gaussian import WitnessFunction
from .hausdorff import (
    ConditionReport,
    condition_value,
    grid_operator_derivative,
    kernel_nodes,
    support_samples,
    truncate_kernel,
)
from .matrices import Decomposed, eta_margin
from .quadrature import Status, integrate_space

__all__ = [
    "SobolevNorm",
    "Certificate",
    "multi_indices_upto",
    "wk1_norm",
    "wk1_norm_operator_image",
    "fd_weak_derivative",
    "verify_interchange",
    "certify",
    "blowup_witness",
    "theorem1_kappa",
]


def multi_indices_upto(n, k):
    """All multi-indices alpha with |alpha| <= k, lexicographic by order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for head in range(remaining + 1):
            rec(prefix + (head,), remaining - head, slots - 1)

    for total in range(k + 1):
        rec((), total, n)
    return out


@dataclass
class SobolevNorm:
    k: int
    per_alpha: dict
    total: float


@dataclass
class Certificate:
    verdict: str  # "bounded" | "unbounded" | "inconclusive"
    constant: float | None = None
    evidence: ConditionReport | None = None
    reason: str | None = None
    preconditions: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# W^{k,1} norms


def _l1_norm(f, tol):
    value = f.l1_closed_form()
    if value is None:
        value = f.l1_exact()
    if value is None:
        r = integrate_space(lambda pt: abs(f(np.asarray(pt))), f.dim, tol=tol)
        value = r.value
    return value


def wk1_norm(f, k, tol=1e-9):
    """Sum over |alpha| <= k of the L1 norms of the exact derivatives."""
    per_alpha = {}
    for alpha in multi_indices_upto(f.dim, k):
        per_alpha[alpha] = _l1_norm(f.derivative(alpha), tol)
    return SobolevNorm(k=k, per_alpha=per_alpha,
                       total=math.fsum(per_alpha.values()))


def _function_radius(f):
    """Radius beyond which every term of f is negligible (< ~1e-9)."""
    radius = 0.0
    for _, factors in f.terms:
        for fac in factors:
            reach = (5.0 + 0.5 * (len(fac.poly) - 1) + abs(fac.shift)) / fac.scale
            radius = max(radius, reach)
    return radius


def _image_extent(f, fam, nodes):
    r_f = _function_radius(f)
    worst = 0.0
    for y in nodes:
        a = fam(y)
        sigma_min = float(np.linalg.svd(a, compute_uv=False)[-1])
        if sigma_min > 0.0:
            worst = max(worst, 1.0 / sigma_min)
    return min(r_f * max(worst, 1.0) * 1.05 + 1.0, 1e5)


def _l1_axes(extent, dim):
    """Composite Gauss-Legendre tensor axes for outer L1 quadrature."""
    if dim == 1:
        panels = int(min(4000, max(1200, 60 * extent)))
        order = 6
    else:
        panels = 56
        order = 4
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-extent, extent, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    centers = 0.5 * (edges[:-1] + edges[1:])
    xs = (centers[:, None] + half * nodes[None, :]).reshape(-1)
    ws = np.tile(half * weights, panels)
    return [xs] * dim, [ws] * dim


def wk1_norm_operator_image(kernel, fam, f, k, tol=1e-8, report=None,
                            node_order=8):
    """W^{k,1} norm of H_{Phi,A} f measured through the derivative formula.

    Valid only when the order-k condition integral converges; refuses to
    run otherwise.
    """
    if report is None:
        report = condition_value(kernel, fam, k)
    if report.quad.status is not Status.CONVERGED:
        raise PreconditionUnmet(
            f"C_{k} not convergent (status {report.quad.status.value}); "
            "the formula route is invalid")
    if kernel.dim == 1:
        nodes, weights = kernel_nodes(kernel, fam, order=node_order)
    else:
        # higher dimensions: lighter radial rule, the integrand is smooth in r
        nodes, weights = kernel_nodes(kernel, fam, order=min(node_order, 6),
                                      per_decade=5)
    extent = _image_extent(f, fam, nodes)
    axes, axis_weights = _l1_axes(extent, kernel.dim)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    wgrid = axis_weights[0]
    for w in axis_weights[1:]:
        wgrid = np.multiply.outer(wgrid, w)

    per_alpha = {}
    for alpha in multi_indices_upto(kernel.dim, k):
        vals = grid_operator_derivative(kernel, fam, f, alpha, pts,
                                        nodes=nodes, weights=weights)
        per_alpha[alpha] = float(np.sum(wgrid * np.abs(vals)))
    return SobolevNorm(k=k, per_alpha=per_alpha,
                       total=math.fsum(per_alpha.values()))


# ---------------------------------------------------------------------------
# Finite-difference oracle

_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _apply_stencil(values, axis, d, h):
    offsets, coeffs = _STENCILS[d]
    radius = max(abs(o) for o in offsets)
    size = values.shape[axis]
    if size < 2 * d + 1:
        raise GridTooCoarse(
            f"axis {axis} has {size} points, needs at least {2 * d + 1}")
    out = np.full_like(values, np.nan)
    core = [slice(None)] * values.ndim
    core[axis] = slice(radius, size - radius)
    acc = np.zeros_like(values[tuple(core)])
    for off, c in zip(offsets, coeffs):
        src = [slice(None)] * values.ndim
        src[axis] = slice(radius + off, size - radius + off or None)
        acc = acc + c * values[tuple(src)]
    out[tuple(core)] = acc / h ** d
    return out


def fd_weak_derivative(values, alpha, h):
    """Second-order central differences composed per component.

    Grid borders that lack stencil support are returned as NaN.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != len(alpha):
        raise ValueError("grid rank must match the multi-index length")
    if any(d > 4 for d in alpha):
        raise GridTooCoarse("componentwise derivative order limited to 4")
    out = values
    for axis, d in enumerate(alpha):
        if d:
            out = _apply_stencil(out, axis, d, h)
    return out


@dataclass
class InterchangeReport:
    max_abs_discrepancy: float
    passed: bool
    tol: float


def verify_interchange(kernel, fam, f, alpha, axes, tol, report=None):
    """Finite differences of the directly-evaluated image against the
    derivative formula on a uniform grid; pass iff max discrepancy <= tol."""
    order = sum(alpha)
    if report is None:
        report = condition_value(kernel, fam, order)
    if report.quad.status is not Status.CONVERGED:
        raise PreconditionUnmet("interchange requires a convergent condition integral")
    axes = [np.asarray(a, dtype=float) for a in axes]
    h = float(axes[0][1] - axes[0][0])
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    zero = (0,) * kernel.dim
    direct = grid_operator_derivative(kernel, fam, f, zero, pts, order=10)
    fd = fd_weak_derivative(direct, alpha, h)
    formula = grid_operator_derivative(kernel, fam, f, alpha, pts, order=7)
    mask = np.isfinite(fd)
    disc = float(np.max(np.abs(fd[mask] - formula[mask])))
    return InterchangeReport(max_abs_discrepancy=disc, passed=disc <= tol,
                             tol=tol)


# ---------------------------------------------------------------------------
# Certification (Theorem-2-style trichotomy)


def certify(kernel, fam, k, eta_floor=1e-6, tol=1e-7, n_samples=1000, seed=7,
            inner_schedule=None, outer_schedule=None):
    """Three-way verdict from the condition integral, after sampled
    precondition checks; never guesses when a precondition fails."""
    samples = support_samples(kernel, n_samples, seed=seed)
    preconds = {"samples_used": len(samples)}

    negative = None
    for y in samples:
        if kernel(y) < -1e-12:
            negative = y
            break
    preconds["nonneg_checked"] = negative is None
    if negative is not None:
        return Certificate("inconclusive",
                           reason=f"kernel negative at sampled y = {negative}",
                           preconditions=preconds)

    margin = eta_margin(fam, samples)
    preconds["eta_margin"] = margin
    if margin < eta_floor:
        return Certificate(
            "inconclusive",
            reason=f"sampled eta margin {margin:.3g} below floor {eta_floor:.3g}",
            preconditions=preconds)

    if isinstance(fam, Decomposed) and not fam.validate_nonneg(samples):
        return Certificate("inconclusive",
                           reason="decomposed inner factor not nonnegative on supp Phi",
                           preconditions=preconds)

    report = condition_value(kernel, fam, k, tol=tol,
                             inner_schedule=inner_schedule,
                             outer_schedule=outer_schedule)
    if report.quad.status is Status.CONVERGED:
        return Certificate("bounded", constant=report.quad.value,
                           evidence=report, preconditions=preconds)
    if report.quad.status is Status.DIVERGENT:
        return Certificate("unbounded", evidence=report, preconditions=preconds)
    return Certificate("inconclusive", evidence=report,
                       reason="condition probe inconclusive",
                       preconditions=preconds)


# ---------------------------------------------------------------------------
# Blow-up witness


def blowup_witness(kernel, fam, k, radii=None, tol=1e-7):
    """Growth table for truncated kernels Phi_j = Phi * chi_{1/R < |y| < R}.

    S_j is the truncated condition value, W_j the measured W^{k,1} norm of
    the operator applied to the order-k witness function; the table realizes
    the necessity proof's monotone lower-bound chain.
    """
    if not kernel.nonneg:
        raise PreconditionUnmet("blow-up witness requires a nonnegative kernel")
    if radii is None:
        radii = [2.0 ** j for j in range(9)]
    witness = WitnessFunction(max(k, 1), kernel.dim).as_test_function()
    rows = []
    for radius in radii:
        trunc = truncate_kernel(kernel, 1.0 / radius, radius)
        lo, hi = trunc.support.radial_bounds()
        if lo >= hi:
            rows.append({"R": radius, "S": 0.0, "W": 0.0})
            continue
        report = condition_value(trunc, fam, k, tol=tol)
        image = wk1_norm_operator_image(trunc, fam, witness, k, report=report)
        rows.append({"R": radius, "S": report.quad.value, "W": image.total})
    return rows


# ---------------------------------------------------------------------------
# Explicit constant for the sufficiency inequality


def theorem1_kappa(kernel, fam, k, n_samples=400, seed=11):
    """max over sampled supp Phi of
    sum_{|alpha|<=k} prod_j (sum_i |a_ij|)^{alpha_j} / (1 + ||A||_F^k)."""
    worst = 0.0
    for y in support_samples(kernel, n_samples, seed=seed):
        if kernel(y) == 0.0:
            continue
        a = np.abs(np.asarray(fam(y), dtype=float))
        colsums = a.sum(axis=0)
        fro = float(np.sqrt(np.sum(a * a)))
        num = math.fsum(
            math.prod(colsums[j] ** a_j for j, a_j in enumerate(alpha))
            for alpha in multi_indices_upto(kernel.dim, k))
        worst = max(worst, num / (1.0 + fro ** k))
    return worst
