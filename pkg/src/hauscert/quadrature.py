"""Adaptive quadrature over unbounded domains and improper-integral probes."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DimensionTooLarge, NegativeValueDetected

__all__ = [
    "Status",
    "QuadratureResult",
    "integrate_line",
    "integrate_space",
    "improper_probe",
]


class Status(Enum):
    CONVERGED = "converged"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass
class GrowthEvidence:
    """Truncated-integral sequence with a fitted growth law."""

    levels: list  # rows (j, lo_j, hi_j, I_j)
    law: str  # "log" | "power" | "unknown"
    exponent: float | None = None


@dataclass
class QuadratureResult:
    value: float
    err_est: float
    status: Status
    evidence: GrowthEvidence | None = None


# Gauss-Kronrod 7-15 pair on [-1, 1]: (node, Gauss weight, Kronrod weight).
_GK15 = (
    (+0.991455371120813, 0.0, 0.022935322010529),
    (-0.991455371120813, 0.0, 0.022935322010529),
    (+0.949107912342759, 0.129484966168870, 0.063092092629979),
    (-0.949107912342759, 0.129484966168870, 0.063092092629979),
    (+0.864864423359769, 0.0, 0.104790010322250),
    (-0.864864423359769, 0.0, 0.104790010322250),
    (+0.741531185599394, 0.279705391489277, 0.140653259715525),
    (-0.741531185599394, 0.279705391489277, 0.140653259715525),
    (+0.586087235467691, 0.0, 0.169004726639267),
    (-0.586087235467691, 0.0, 0.169004726639267),
    (+0.405845151377397, 0.381830050505119, 0.190350578064785),
    (-0.405845151377397, 0.381830050505119, 0.190350578064785),
    (+0.207784955007898, 0.0, 0.204432940075298),
    (-0.207784955007898, 0.0, 0.204432940075298),
    (0.0, 0.417959183673469, 0.209482141084728),
)


def _panel(f, a, b):
    """One G7/K15 pass; returns (K15 value, error estimate)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    g7 = 0.0
    k15 = 0.0
    for z, wg, wk in _GK15:
        fz = f(mid + half * z)
        g7 += wg * fz
        k15 += wk * fz
    g7 *= half
    k15 *= half
    diff = abs(k15 - g7)
    # standard QUADPACK-style sharpened estimate
    err = diff if diff == 0.0 else min(diff, (200.0 * diff) ** 1.5)
    if not math.isfinite(k15):
        err = math.inf
    return k15, err


def _map_infinite(f, a, b):
    """Substitute t = u/(1-u^2) (or a shifted half of it) for infinite ends."""
    if a == -math.inf and b == math.inf:
        def g(u):
            d = 1.0 - u * u
            return f(u / d) * (1.0 + u * u) / (d * d)

        return g, -1.0, 1.0
    if b == math.inf:
        def g(u):
            d = 1.0 - u * u
            return f(a + u / d) * (1.0 + u * u) / (d * d)

        return g, 0.0, 1.0
    if a == -math.inf:
        def g(u):
            d = 1.0 - u * u
            return f(b - u / d) * (1.0 + u * u) / (d * d)

        return g, 0.0, 1.0
    return f, a, b


def integrate_line(f, a, b, tol=1e-9, max_panels=4000, min_panels=8):
    """Globally adaptive Gauss-Kronrod quadrature of f over (a, b).

    Infinite endpoints are handled by the rational substitution above.
    Returns a QuadratureResult; MaxDepthExceeded surfaces as Inconclusive.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, Status.CONVERGED)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    g, lo, hi = _map_infinite(f, a, b)

    heap = []  # (-err, lo, hi, value)
    total = 0.0
    total_err = 0.0
    width = (hi - lo) / min_panels
    for i in range(min_panels):
        left = lo + i * width
        right = hi if i == min_panels - 1 else left + width
        v, e = _panel(g, left, right)
        heapq.heappush(heap, (-e, left, right, v))
        total += v
        total_err += e

    npanels = min_panels
    while total_err > tol and npanels < max_panels:
        neg_e, left, right, v = heapq.heappop(heap)
        total -= v
        total_err += neg_e  # neg_e == -e
        mid = 0.5 * (left + right)
        for lo2, hi2 in ((left, mid), (mid, right)):
            v2, e2 = _panel(g, lo2, hi2)
            heapq.heappush(heap, (-e2, lo2, hi2, v2))
            total += v2
            total_err += e2
        npanels += 1

    # refined summation in a fixed order for determinism
    value = sign * math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    status = Status.CONVERGED if err <= tol else Status.INCONCLUSIVE
    return QuadratureResult(value, err, status)


def integrate_space(f, n, tol=1e-8, bounds=None, max_panels=4000):
    """Iterated 1-D quadrature of f over R^n (or the given per-axis bounds)."""
    if n > 4:
        raise DimensionTooLarge(f"n = {n} exceeds the supported limit 4")
    if bounds is None:
        bounds = [(-math.inf, math.inf)] * n
    level_tol = tol / n
    worst = {"err": 0.0, "bad": False}

    def nest(level, fixed):
        lo, hi = bounds[level]
        if level == n - 1:
            def line(t):
                return f(fixed + (t,))
        else:
            def line(t):
                return nest(level + 1, fixed + (t,))

        r = integrate_line(line, lo, hi, tol=level_tol, max_panels=max_panels)
        if level > 0:
            worst["err"] = max(worst["err"], r.err_est)
            if r.status is not Status.CONVERGED:
                worst["bad"] = True
        return r.value

    if n == 1:
        return integrate_line(lambda t: f((t,)), bounds[0][0], bounds[0][1],
                              tol=tol, max_panels=max_panels)

    outer = integrate_line(lambda t: nest(1, (t,)), bounds[0][0], bounds[0][1],
                           tol=level_tol, max_panels=max_panels)
    err = outer.err_est + worst["err"]
    status = outer.status
    if worst["bad"]:
        status = Status.INCONCLUSIVE
    elif status is Status.CONVERGED and err > tol:
        status = Status.CONVERGED  # per-level budget already enforced
    return QuadratureResult(outer.value, err, status)


def _fit_growth(js, values):
    """Fit I_j against j: linear => log growth, geometric => power growth."""
    m = len(js)
    if m < 3 or any(v <= 0 for v in values):
        return "unknown", None

    def linfit(ys):
        jbar = sum(js) / m
        ybar = sum(ys) / m
        sxx = sum((j - jbar) ** 2 for j in js)
        sxy = sum((j - jbar) * (y - ybar) for j, y in zip(js, ys))
        slope = sxy / sxx
        icpt = ybar - slope * jbar
        resid = max(abs(y - (icpt + slope * j)) for j, y in zip(js, ys))
        return slope, resid

    slope_lin, resid_lin = linfit(values)
    logs = [math.log(v) for v in values]
    slope_geo, resid_geo = linfit(logs)
    scale = max(abs(v) for v in values)
    if resid_lin <= 0.05 * scale and slope_lin > 0:
        return "log", None
    if resid_geo <= 0.05 * max(abs(v) for v in logs) and slope_geo > 0:
        return "power", slope_geo / math.log(2.0)
    return "unknown", None


def improper_probe(f, inner_schedule=None, outer_schedule=None, tol=1e-6,
                   lo=0.0, hi=math.inf, quad_tol=None, check_sign=True):
    """Classify the improper integral of a nonnegative f over (lo, hi).

    Truncations I_j = int over (max(eps_j, lo), min(R_j, hi)) are computed
    incrementally along the default schedules eps_j = 2^-j, R_j = 2^j.
    """
    if inner_schedule is None:
        inner_schedule = [2.0 ** -j for j in range(21)]
    if outer_schedule is None:
        outer_schedule = [2.0 ** j for j in range(21)]
    levels = min(len(inner_schedule), len(outer_schedule))
    if quad_tol is None:
        quad_tol = tol / (4 * levels)

    eps = [min(max(e, lo), hi) for e in inner_schedule[:levels]]
    caps = [max(min(r, hi), lo) for r in outer_schedule[:levels]]
    for j in range(levels):
        if eps[j] > caps[j]:
            eps[j] = caps[j]

    if check_sign:
        for j in (0, levels // 2, levels - 1):
            a, b = eps[j], caps[j]
            if a >= b:
                continue
            for frac in (0.11, 0.37, 0.52, 0.78, 0.93):
                t = a + frac * (b - a)
                if f(t) < -1e-12:
                    raise NegativeValueDetected(f"f({t}) < 0; probe semantics invalid")

    rows = []
    values = []
    acc = 0.0
    prev_lo = prev_hi = None
    for j in range(levels):
        a, b = eps[j], caps[j]
        if prev_lo is None:
            acc = integrate_line(f, a, b, tol=quad_tol).value if a < b else 0.0
        else:
            if a < prev_lo:
                acc += integrate_line(f, a, prev_lo, tol=quad_tol).value
            if b > prev_hi:
                acc += integrate_line(f, prev_hi, b, tol=quad_tol).value
        prev_lo, prev_hi = min(a, prev_lo or a), max(b, prev_hi or b)
        rows.append((j, a, b, acc))
        values.append(acc)

    # convergence: the last few increments are below tolerance, or they
    # decay geometrically and the extrapolated tail is within tolerance
    diffs = [abs(values[j] - values[j - 1]) for j in range(1, levels)]
    scale = max(1.0, abs(values[-1]))
    value = values[-1]
    err = (max(diffs[-3:]) if len(diffs) >= 3 else math.inf) + quad_tol * levels
    converged = len(diffs) >= 3 and all(d <= tol * scale for d in diffs[-3:])
    if not converged and len(diffs) >= 6:
        recent = diffs[-6:]
        if all(d > 0.0 for d in recent):
            ratios = [recent[i + 1] / recent[i] for i in range(5)]
            spread = max(ratios) - min(ratios)
            if all(0.02 <= r <= 0.9 for r in ratios) and spread <= 0.2:
                r_est = sorted(ratios)[2]
                tail = recent[-1] * r_est / (1.0 - r_est)
                tail_err = tail * spread / (1.0 - max(ratios)) \
                    + quad_tol * levels
                if tail_err <= tol * scale:
                    value = values[-1] + tail
                    err = tail_err
                    converged = True
    if converged:
        return QuadratureResult(value, err, Status.CONVERGED,
                                GrowthEvidence(rows, "none"))

    # divergence: I_j / I_{j/2} >= 1.5 persistently over the last 5 levels
    ratios_ok = 0
    for j in range(levels - 1, max(levels - 6, 0), -1):
        ref = values[j // 2]
        if ref > 0 and values[j] / ref >= 1.5 and values[j] >= values[j - 1]:
            ratios_ok += 1
    if ratios_ok >= 5:
        tail = max(0, levels - 10)
        law, exponent = _fit_growth(list(range(tail, levels)), values[tail:])
        return QuadratureResult(values[-1], math.inf, Status.DIVERGENT,
                                GrowthEvidence(rows, law, exponent))

    return QuadratureResult(values[-1], math.inf, Status.INCONCLUSIVE,
                            GrowthEvidence(rows, "unknown"))
