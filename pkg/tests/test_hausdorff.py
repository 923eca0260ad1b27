"""Operator evaluation, condition integrals, derivative formulas and the
conjugation reduction."""

import math

import numpy as np
import pytest

from hauscert.classical import adjoint_hardy_kernel, hardy_kernel
from hauscert.errors import NegativeKernel, OrderTooLarge, PreconditionUnmet
from hauscert.exprcfg import parse_expr
from hauscert.hausdorff import (
    Annulus,
    Interval,
    KernelSpec,
    apply_point,
    condition_value,
    derivative_formula_point,
    directional_expansion,
    gradient_point,
    grid_operator_derivative,
    hessian_point,
    kernel_nodes,
    reduce_conjugate,
    support_samples,
    truncate_kernel,
)
from hauscert.matrices import ConstantMatrix, DiagonalInverseNorm
from hauscert.quadrature import Status, improper_probe, integrate_line
from hauscert.testfuncs import gauss_product

from conftest import annulus_kernel, damped_kernel


def one_sided_shell():
    return KernelSpec(1, parse_expr("chi(1,2)(y1)", 1), Interval(1.0, 2.0))


def mass_one_kernel():
    return KernelSpec(1, parse_expr("chi(0,1)(nrm(y))/2", 1), Annulus(0.0, 1.0))


class TestKernelSpec:
    def test_zero_outside_support(self):
        k = one_sided_shell()
        assert k(np.array([3.0])) == 0.0
        assert k(np.array([1.5])) == 1.0

    def test_negative_kernel_caught_at_construction(self):
        with pytest.raises(NegativeKernel):
            KernelSpec(1, parse_expr("-1", 1), Interval(0.0, 1.0))

    def test_radial_detection(self):
        assert annulus_kernel(2).is_radial
        assert not KernelSpec(2, parse_expr("chi(0,1)(y1*y1+y2*y2)", 2),
                              Annulus(0.0, 1.0)).is_radial

    def test_truncation_intersects_support(self):
        trunc = truncate_kernel(hardy_kernel(), 0.5, 4.0)
        assert trunc.support.radial_bounds() == (1.0, 4.0)
        assert trunc(np.array([5.0])) == 0.0
        assert trunc(np.array([2.0])) == 0.25

    def test_support_samples_deterministic_and_contained(self):
        k = annulus_kernel(2)
        a = support_samples(k, 200, seed=5)
        b = support_samples(k, 200, seed=5)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert all(k.support.contains(y) for y in a)


class TestApply:
    def test_mass_one_kernel_is_identity(self):
        kernel = mass_one_kernel()
        fam = ConstantMatrix(np.eye(1))
        f = gauss_product(1, [0.0])
        for x in (-1.0, 0.3, 2.0):
            r = apply_point(kernel, fam, f, x)
            assert r.status is Status.CONVERGED
            assert r.value == pytest.approx(f(x), abs=1e-8)

    def test_constant_family_scales_by_kernel_mass(self):
        # int |y|^2 e^{-|y|^2} dy over the plane equals pi
        kernel = damped_kernel(2)
        fam = ConstantMatrix(0.5 * np.eye(2))
        f = gauss_product(2, [0.0, 0.0])
        x = np.array([0.4, -0.2])
        r = apply_point(kernel, fam, f, x, tol=1e-9)
        assert r.value == pytest.approx(math.pi * f(0.5 * x), abs=1e-7)

    def test_hardy_instance(self):
        erf_part = integrate_line(lambda t: math.exp(-t * t), 0.0, 1.0).value
        r = apply_point(hardy_kernel(), DiagonalInverseNorm(1),
                        gauss_product(1, [0.0]), 1.0)
        assert r.value == pytest.approx(erf_part, abs=1e-7)
        assert r.value == pytest.approx(0.7468241, abs=1e-6)

    def test_shell_at_origin(self):
        r = apply_point(one_sided_shell(), DiagonalInverseNorm(1),
                        gauss_product(1, [0.0]), 0.0)
        assert r.value == pytest.approx(1.0, abs=1e-8)

    def test_linearity(self):
        kernel = one_sided_shell()
        fam = DiagonalInverseNorm(1)
        f = gauss_product(1, [0.0])
        g = gauss_product(1, [1.0])
        x = 0.7
        lhs = apply_point(kernel, fam, f + 2.0 * g, x, tol=1e-9).value
        rhs = (apply_point(kernel, fam, f, x, tol=1e-9).value
               + 2.0 * apply_point(kernel, fam, g, x, tol=1e-9).value)
        assert lhs == pytest.approx(rhs, abs=2e-9)

    def test_positivity(self):
        r = apply_point(annulus_kernel(2), DiagonalInverseNorm(2),
                        gauss_product(2, [0.0, 0.0]), np.array([1.0, 2.0]))
        assert r.value >= -1e-10


class TestConditionIntegral:
    def test_adjoint_hardy_order_zero(self):
        report = condition_value(adjoint_hardy_kernel(),
                                 DiagonalInverseNorm(1), 0)
        assert report.quad.status is Status.CONVERGED
        assert report.quad.value == pytest.approx(2.0, abs=1e-6)
        assert report.breakdown[0].value == pytest.approx(1.0, abs=1e-6)

    def test_hardy_diverges_logarithmically(self):
        report = condition_value(hardy_kernel(), DiagonalInverseNorm(1), 0)
        assert report.quad.status is Status.DIVERGENT
        assert report.quad.evidence.law == "log"

    def test_two_sided_shell_order_one(self):
        # closed form 2 int_1^2 (t + 1) dt = 5
        report = condition_value(annulus_kernel(1), DiagonalInverseNorm(1), 1)
        assert report.quad.status is Status.CONVERGED
        assert report.quad.value == pytest.approx(5.0, abs=1e-6)

    def test_breakdown_orders_sum_consistently(self):
        report = condition_value(annulus_kernel(1), DiagonalInverseNorm(1), 1)
        total = report.breakdown[0].value + report.breakdown[1].value
        assert report.quad.value == pytest.approx(total, abs=1e-6)

    def test_negative_kernel_flag_rejected(self):
        k = KernelSpec(1, parse_expr("1", 1), Interval(0.0, 1.0), nonneg=False)
        with pytest.raises(NegativeKernel):
            condition_value(k, DiagonalInverseNorm(1), 0)

    @pytest.mark.parametrize("kernel,k,expected", [
        (annulus_kernel(1), 1, Status.CONVERGED),
        (hardy_kernel(), 0, Status.DIVERGENT),
        (damped_kernel(2), 2, Status.CONVERGED),
    ])
    def test_diagonal_family_matches_reduced_integrand(self, kernel, k,
                                                       expected):
        """For A(y) = diag(1/|y|) the condition integrand collapses to
        area * r^{n-1} Phi(r e1) r^n (1 + n^{k/2} r^{-k}); probing that
        scalar directly must agree with the full machinery."""
        n = kernel.dim
        fam = DiagonalInverseNorm(n)
        area = 2.0 if n == 1 else 2.0 * math.pi
        lo, hi = kernel.support.radial_bounds()
        e1 = np.zeros(n)

        def reduced(r):
            e1[0] = r
            return (area * r ** (n - 1) * kernel(e1) * r ** n
                    * (1.0 + n ** (k / 2.0) * r ** -k))

        direct = improper_probe(reduced, lo=lo, hi=hi, check_sign=False)
        report = condition_value(kernel, fam, k)
        assert report.quad.status is expected
        assert direct.status is expected
        if expected is Status.CONVERGED:
            assert report.quad.value == pytest.approx(direct.value, rel=1e-5)


class TestDirectionalExpansion:
    def test_first_order(self):
        a = np.array([[1.5, -2.0], [3.0, 0.5]])
        assert directional_expansion(a, (1, 0)) == {(1, 0): 1.5, (0, 1): 3.0}

    def test_mixed_order(self):
        a = np.array([[2.0, 3.0], [5.0, 7.0]])
        got = directional_expansion(a, (1, 1))
        assert got[(2, 0)] == pytest.approx(6.0)        # a*b
        assert got[(1, 1)] == pytest.approx(29.0)       # a*d + b*c
        assert got[(0, 2)] == pytest.approx(35.0)       # c*d

    def test_identity(self):
        for alpha in ((2, 1), (0, 3)):
            assert directional_expansion(np.eye(2), alpha) == {alpha: 1.0}

    def test_order_cap(self):
        with pytest.raises(OrderTooLarge):
            directional_expansion(np.eye(2), (7, 6))

    def test_checksum_property(self, rng):
        """Coefficients sum to prod_j (sum_i a_ij)^{alpha_j}."""
        for _ in range(1000):
            n = int(rng.integers(1, 4))
            a = rng.uniform(-2.0, 2.0, size=(n, n))
            alpha = tuple(int(v) for v in rng.multinomial(
                int(rng.integers(0, 6)), np.full(n, 1.0 / n)))
            coeffs = directional_expansion(a, alpha)
            total = math.fsum(coeffs.values())
            expected = math.prod(a[:, j].sum() ** alpha[j] for j in range(n))
            assert total == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestDerivativeFormula:
    def test_order_zero_is_apply(self):
        kernel = one_sided_shell()
        fam = DiagonalInverseNorm(1)
        f = gauss_product(1, [0.0])
        a = derivative_formula_point(kernel, fam, f, (0,), 0.7).value
        b = apply_point(kernel, fam, f, 0.7).value
        assert a == pytest.approx(b, abs=1e-10)

    def test_odd_symmetry_kills_gradient_at_origin(self):
        r = derivative_formula_point(one_sided_shell(), DiagonalInverseNorm(1),
                                     gauss_product(1, [0.0]), (1,), 0.0)
        assert r.value == pytest.approx(0.0, abs=1e-10)

    def test_against_independent_quadrature(self):
        # d/dx H f at x = 1: int_1^2 (1/t) f'(1/t) dt with f' = -2u e^{-u^2}
        oracle = integrate_line(
            lambda t: (1.0 / t) * (-2.0 / t) * math.exp(-1.0 / t ** 2),
            1.0, 2.0, tol=1e-12).value
        r = derivative_formula_point(one_sided_shell(), DiagonalInverseNorm(1),
                                     gauss_product(1, [0.0]), (1,), 1.0,
                                     tol=1e-10)
        assert r.value == pytest.approx(oracle, abs=1e-8)

    def test_refuses_divergent_condition(self):
        with pytest.raises(PreconditionUnmet):
            derivative_formula_point(hardy_kernel(), DiagonalInverseNorm(1),
                                     gauss_product(1, [0.0]), (1,), 1.0)

    def test_gradient_constant_family_closed_form(self):
        kernel = damped_kernel(2)
        a = np.array([[0.6, 0.1], [-0.2, 0.8]])
        fam = ConstantMatrix(a)
        f = gauss_product(2, [0.0, 0.0])
        x = np.array([0.5, -0.4])
        report = condition_value(kernel, fam, 1)
        got = gradient_point(kernel, fam, f, x, report=report)
        # H f = mass * f(Ax) with mass = pi, so grad = mass A^T grad f(Ax)
        ax = a @ x
        grad_f = np.array([f.derivative((1, 0))(ax), f.derivative((0, 1))(ax)])
        np.testing.assert_allclose(got, math.pi * a.T @ grad_f, atol=1e-6)

    def test_hessian_symmetric(self):
        kernel = damped_kernel(2)
        fam = ConstantMatrix(np.array([[0.7, 0.2], [0.0, 0.9]]))
        f = gauss_product(2, [0.0, 0.0])
        report = condition_value(kernel, fam, 2)
        h = hessian_point(kernel, fam, f, np.array([0.3, 0.1]), report=report)
        assert h[0, 1] == h[1, 0]


class TestGridEvaluation:
    def test_grid_matches_pointwise(self):
        kernel = one_sided_shell()
        fam = DiagonalInverseNorm(1)
        f = gauss_product(1, [0.0])
        pts = np.array([[-1.0], [0.0], [0.8], [2.5]])
        nodes, weights = kernel_nodes(kernel, fam)
        for alpha in ((0,), (1,), (2,)):
            report = condition_value(kernel, fam, sum(alpha))
            grid_vals = grid_operator_derivative(kernel, fam, f, alpha, pts,
                                                 nodes=nodes, weights=weights)
            for x, v in zip(pts, grid_vals):
                ref = derivative_formula_point(kernel, fam, f, alpha, x,
                                               report=report).value
                assert v == pytest.approx(ref, abs=1e-6)

    def test_constant_family_fast_path(self):
        kernel = mass_one_kernel()
        fam = ConstantMatrix(np.array([[2.0]]))
        f = gauss_product(1, [0.0])
        pts = np.linspace(-2.0, 2.0, 9)[:, None]
        vals = grid_operator_derivative(kernel, fam, f, (1,), pts)
        expected = 2.0 * np.array([f.derivative((1,))(2.0 * x) for x in pts])
        np.testing.assert_allclose(vals, expected.ravel(), atol=1e-8)

    def test_kernel_nodes_integrate_the_kernel(self):
        kernel = damped_kernel(2)
        fam = DiagonalInverseNorm(2)
        nodes, weights = kernel_nodes(kernel, fam)
        mass = math.fsum(w * kernel(y) for y, w in zip(nodes, weights))
        assert mass == pytest.approx(math.pi, rel=1e-6)


class TestConjugation:
    def test_identity_decomposition(self):
        f = gauss_product(1, [0.0])
        pieces = reduce_conjugate(np.eye(1), DiagonalInverseNorm(1), np.eye(1),
                                  lambda x: f(x))
        x = np.array([0.7])
        assert pieces["F"](x) == pytest.approx(f(x), abs=1e-15)
        np.testing.assert_allclose(pieces["transform"](x), x)

    def test_scalar_conjugation_agrees(self):
        kernel = one_sided_shell()
        inner = DiagonalInverseNorm(1)
        f = gauss_product(1, [0.0])
        lam = np.array([[2.0]])
        q = np.array([[3.0]])
        pieces = reduce_conjugate(lam, inner, q, lambda x: f(x))
        for x in (0.5, 1.0, 2.0):
            lhs = apply_point(kernel, inner, f, x, tol=1e-10).value
            rhs = apply_point(kernel, pieces["family"], pieces["F"],
                              pieces["transform"](np.array([x])),
                              tol=1e-10).value
            assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_plane_conjugation_agrees(self, rng):
        kernel = annulus_kernel(2)
        inner = DiagonalInverseNorm(2)
        f = gauss_product(2, [0.0, 0.0])
        lam = np.eye(2) + 0.3 * rng.uniform(-1.0, 1.0, size=(2, 2))
        q = np.eye(2) + 0.3 * rng.uniform(-1.0, 1.0, size=(2, 2))
        pieces = reduce_conjugate(lam, inner, q, lambda x: f(x))
        for _ in range(3):
            x = rng.uniform(-1.5, 1.5, size=2)
            lhs = apply_point(kernel, inner, f, x, tol=1e-9).value
            rhs = apply_point(kernel, pieces["family"], pieces["F"],
                              pieces["transform"](x), tol=1e-9).value
            assert lhs == pytest.approx(rhs, abs=1e-6)
