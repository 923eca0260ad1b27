"""Adaptive line/space quadrature and the improper-integral probe."""

import math

import pytest

from hauscert.errors import DimensionTooLarge, NegativeValueDetected
from hauscert.quadrature import (
    Status,
    improper_probe,
    integrate_line,
    integrate_space,
)

SQRT_PI = math.sqrt(math.pi)


class TestIntegrateLine:
    def test_gaussian_whole_line(self):
        r = integrate_line(lambda t: math.exp(-t * t), -math.inf, math.inf,
                           tol=1e-9)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(SQRT_PI, abs=1e-8)

    def test_inverse_square_tail(self):
        r = integrate_line(lambda t: t ** -2, 1.0, math.inf, tol=1e-9)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(1.0, abs=1e-8)

    def test_inverse_sqrt_endpoint(self):
        r = integrate_line(lambda t: t ** -0.5, 0.0, 1.0, tol=1e-9)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(2.0, abs=1e-7)

    def test_reversed_bounds_flip_sign(self):
        r = integrate_line(lambda t: t, 1.0, 0.0)
        assert r.value == pytest.approx(-0.5, abs=1e-12)

    def test_empty_interval(self):
        r = integrate_line(lambda t: 1.0, 2.0, 2.0)
        assert r.value == 0.0 and r.status is Status.CONVERGED

    def test_panel_budget_exhaustion_is_inconclusive(self):
        r = integrate_line(lambda t: math.sin(200.0 * t) ** 2 / (1.0 + t * t),
                           0.0, math.inf, tol=1e-14, max_panels=12)
        assert r.status is Status.INCONCLUSIVE
        assert r.err_est > 1e-14


class TestIntegrateSpace:
    def test_gaussian_plane(self):
        r = integrate_space(lambda p: math.exp(-(p[0] ** 2 + p[1] ** 2)), 2)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(math.pi, abs=1e-6)

    def test_shifted_gaussian_plane(self):
        # |G_1| in two variables integrates to pi as well
        r = integrate_space(
            lambda p: math.exp(-(p[0] + 0.5) ** 2 - (p[1] + 0.5) ** 2), 2)
        assert r.value == pytest.approx(math.pi, abs=1e-6)

    def test_gaussian_three_dim(self):
        r = integrate_space(
            lambda p: math.exp(-sum(v * v for v in p)), 3, tol=1e-7)
        assert r.value == pytest.approx(math.pi ** 1.5, rel=1e-6)

    def test_dimension_limit(self):
        with pytest.raises(DimensionTooLarge):
            integrate_space(lambda p: 0.0, 5)

    def test_bounded_box(self):
        r = integrate_space(lambda p: p[0] * p[1], 2,
                            bounds=[(0.0, 1.0), (0.0, 2.0)])
        assert r.value == pytest.approx(1.0, abs=1e-9)


class TestImproperProbe:
    def test_convergent_tail(self):
        r = improper_probe(lambda t: t ** -2, lo=1.0)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(1.0, abs=1e-5)

    def test_convergent_origin_singularity(self):
        r = improper_probe(lambda t: t ** -0.5, lo=0.0, hi=1.0)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(2.0, abs=1e-5)

    def test_divergent_log_at_infinity(self):
        r = improper_probe(lambda t: 1.0 / t, lo=1.0)
        assert r.status is Status.DIVERGENT
        assert r.evidence.law == "log"

    def test_divergent_log_at_origin(self):
        r = improper_probe(lambda t: 1.0 / t, lo=0.0, hi=1.0)
        assert r.status is Status.DIVERGENT
        assert r.evidence.law == "log"

    def test_divergent_power_with_exponent(self):
        r = improper_probe(lambda t: t ** -2, lo=0.0, hi=1.0)
        assert r.status is Status.DIVERGENT
        assert r.evidence.law == "power"
        assert r.evidence.exponent == pytest.approx(1.0, abs=0.05)

    def test_divergent_evidence_is_increasing(self):
        r = improper_probe(lambda t: 1.0 / t, lo=1.0)
        tail = [row[3] for row in r.evidence.levels[10:]]
        assert all(b > a for a, b in zip(tail, tail[1:]))

    def test_negative_integrand_rejected(self):
        with pytest.raises(NegativeValueDetected):
            improper_probe(lambda t: -1.0, lo=0.0, hi=1.0)

    def test_truncation_rows_monotone_for_nonneg(self):
        r = improper_probe(lambda t: math.exp(-t) / math.sqrt(t), lo=0.0)
        values = [row[3] for row in r.evidence.levels]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(SQRT_PI, abs=1e-5)

    @pytest.mark.parametrize("f,lo,hi,expected", [
        (lambda t: 1.0 / t, 1.0, math.inf, Status.DIVERGENT),
        (lambda t: 1.0 / t, 0.0, 1.0, Status.DIVERGENT),
        (lambda t: t ** -2, 1.0, math.inf, Status.CONVERGED),
        (lambda t: 2.0, 0.0, 1.0, Status.CONVERGED),
        (lambda t: t ** -0.5, 0.0, 1.0, Status.CONVERGED),
    ])
    def test_classification_stable_under_coarser_schedule(self, f, lo, hi,
                                                          expected):
        fine = improper_probe(f, lo=lo, hi=hi)
        coarse = improper_probe(f,
                                inner_schedule=[4.0 ** -j for j in range(11)],
                                outer_schedule=[4.0 ** j for j in range(11)],
                                lo=lo, hi=hi)
        assert fine.status is expected
        assert coarse.status is expected

    def test_constant_on_unit_interval(self):
        r = improper_probe(lambda t: 2.0, lo=0.0, hi=1.0)
        assert r.status is Status.CONVERGED
        assert r.value == pytest.approx(2.0, abs=1e-6)
