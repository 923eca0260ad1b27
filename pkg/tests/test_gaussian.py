"""Gaussian-derivative polynomials, shift thresholds and witnesses."""

import math
from decimal import Decimal, getcontext
from math import comb

import pytest

from hauscert.errors import OrderMismatch, OrderTooLarge
from hauscert.gaussian import (
    WitnessFunction,
    hermite_factor_seq,
    shift_threshold,
    witness_derivative,
)


class TestRecursion:
    def test_first_factors_exact(self):
        seq = hermite_factor_seq(3)
        assert seq[0].coeffs == (1,)
        assert seq[1].coeffs == (0, -2)            # -2t
        assert seq[2].coeffs == (-2, 0, 4)         # 4t^2 - 2
        assert seq[3].coeffs == (0, 12, 0, -8)     # -8t^3 + 12t

    def test_degree_and_leading_law(self):
        seq = hermite_factor_seq(60)
        for m, p in enumerate(seq):
            assert len(p.coeffs) == m + 1
            assert p.coeffs[-1] == (-1) ** m * 2 ** m

    def test_coefficients_are_exact_ints_within_double_range(self):
        seq = hermite_factor_seq(25)
        for p in seq:
            for c in p.coeffs:
                assert isinstance(c, int)
                assert float(c) == c  # representable in a double

    def test_order_cap(self):
        with pytest.raises(OrderTooLarge):
            hermite_factor_seq(61)

    def test_parity(self):
        # P_m has the parity of m: only every other coefficient is nonzero
        for m, p in enumerate(hermite_factor_seq(10)):
            for j, c in enumerate(p.coeffs):
                if (j - m) % 2:
                    assert c == 0


# Independent oracle: central finite differences of exp(-t^2) evaluated in
# 60-digit decimal arithmetic, Richardson-extrapolated twice.  Frozen base
# step 1e-3; two extrapolation levels push the truncation error far below
# the 1e-6 comparison tolerance for every order up to 12.

getcontext().prec = 60


def _g_dec(t):
    return (-t * t).exp()


def _central_diff(m, t, h):
    s = Decimal(0)
    for i in range(m + 1):
        offset = (Decimal(m) / 2 - i) * h
        s += (-1) ** i * comb(m, i) * _g_dec(t + offset)
    return s / h ** m


def fd_oracle(m, t):
    t = Decimal(str(t))
    h = Decimal("0.001")
    d1 = _central_diff(m, t, h)
    d2 = _central_diff(m, t, h / 2)
    d3 = _central_diff(m, t, h / 4)
    r1 = (4 * d2 - d1) / 3
    r2 = (4 * d3 - d2) / 3
    return float((16 * r2 - r1) / 15)


@pytest.mark.parametrize("t", [-3.0, -1.0, 0.0, 0.7, 2.5])
def test_factors_match_fd_oracle(t):
    seq = hermite_factor_seq(12)
    for m in range(1, 13):
        exact = seq[m](t) * math.exp(-t * t)
        approx = fd_oracle(m, t)
        scale = max(abs(exact), 1e-6)  # odd orders vanish at t = 0
        assert abs(exact - approx) <= 1e-6 * scale


class TestShiftThreshold:
    def test_a1_is_half(self):
        assert shift_threshold(1) == pytest.approx(0.5, abs=1e-12)

    def test_a2(self):
        assert shift_threshold(2) == pytest.approx(math.sqrt(3.0) / 2.0,
                                                   abs=1e-10)

    def test_a3_root_of_cubic(self):
        a3 = shift_threshold(3)
        assert 1.2 < a3 < 1.3
        assert 8 * a3 ** 3 - 12 * a3 - 1 == pytest.approx(0.0, abs=1e-8)

    def test_monotone_in_order(self):
        thresholds = [shift_threshold(m) for m in range(1, 8)]
        assert all(b >= a for a, b in zip(thresholds, thresholds[1:]))

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_defining_property(self, m):
        a = shift_threshold(m)
        seq = hermite_factor_seq(m)
        # beyond the threshold every signed factor clears 1
        for step in range(1, 2001):
            t = a + 1e-3 + (step - 1) * 0.05
            for i in range(1, m + 1):
                assert (-1) ** i * seq[i](t) >= 1.0 - 1e-9
        # just below it, some constraint fails, so a is sharp
        t = a - 1e-4
        assert any((-1) ** i * seq[i](t) < 1.0 for i in range(1, m + 1))

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            shift_threshold(0)


class TestWitness:
    def test_sign_and_shift(self):
        w1 = WitnessFunction(1, 1)
        assert w1.sign == -1 and w1.shift == pytest.approx(0.5, abs=1e-12)
        assert WitnessFunction(2, 2).sign == 1

    def test_value_examples(self):
        w = WitnessFunction(1, 1)
        assert w(0.0) == pytest.approx(-math.exp(-0.25), abs=1e-14)
        assert witness_derivative(w, (1,), 0.0) == pytest.approx(
            math.exp(-0.25), abs=1e-14)
        assert witness_derivative(w, (0,), 0.0) == pytest.approx(
            -math.exp(-0.25), abs=1e-14)

    def test_order_mismatch(self):
        w = WitnessFunction(2, 2)
        with pytest.raises(OrderMismatch):
            witness_derivative(w, (3, 0), (1.0, 1.0))

    def test_bad_index_length(self):
        with pytest.raises(ValueError):
            witness_derivative(WitnessFunction(1, 2), (1,), (0.0, 0.0))

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_top_order_positivity_on_orthant(self, m, n, rng):
        """D^gamma G_m with |gamma| = m dominates the product of the shifted
        Gaussians everywhere on the positive orthant."""
        w = WitnessFunction(m, n)
        gammas = [tuple(m if l == j else 0 for l in range(n)) for j in range(n)]
        if n > 1 and m >= 2:
            g = [m // 2] * n
            g[0] += m - sum(g)
            gammas.append(tuple(g))
        points = rng.uniform(0.0, 10.0, size=(10_000 // n, n))
        for gamma in gammas:
            if any(c > m for c in gamma):
                continue
            for x in points[:400]:
                lower = math.prod(
                    math.exp(-(v + w.shift) ** 2) for v in x)
                assert witness_derivative(w, gamma, x) >= lower - 1e-12
        # full-density scan on the dominant axis-aligned index
        gamma = gammas[0]
        for x in points:
            assert witness_derivative(w, gamma, x) > 0.0

    def test_as_test_function_agrees(self, rng):
        w = WitnessFunction(2, 2)
        f = w.as_test_function()
        for x in rng.uniform(-3.0, 3.0, size=(50, 2)):
            assert f(x) == pytest.approx(w(x), abs=1e-14)
