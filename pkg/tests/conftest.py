"""Shared builders for the test suite."""

import numpy as np
import pytest

from hauscert import (
    Annulus,
    ConstantMatrix,
    DiagonalInverseNorm,
    KernelSpec,
    WitnessFunction,
    gauss_product,
    parse_expr,
)
from hauscert.hausdorff import AllSpace


def annulus_kernel(n, a=1.0, b=2.0):
    """Indicator of the shell a < |y| < b."""
    expr = parse_expr(f"chi({a},{b})(nrm(y))", n)
    return KernelSpec(n, expr, Annulus(a, b))


def damped_kernel(n):
    """|y|^n exp(-|y|^2), smooth with full support."""
    expr = parse_expr(f"nrm(y)^{n}*exp(-nrm(y)^2)", n)
    return KernelSpec(n, expr, AllSpace())


def diag_family(n):
    return DiagonalInverseNorm(n)


def constant_family(n, seed=3):
    """A well-conditioned constant matrix close to a scaled identity."""
    rng = np.random.default_rng(seed)
    m = 0.8 * np.eye(n) + 0.1 * rng.uniform(-1.0, 1.0, size=(n, n))
    return ConstantMatrix(m)


def standard_functions(n):
    gauss = gauss_product(n, [0.0] * n)
    return [gauss, WitnessFunction(1, n).as_test_function(),
            gauss.dilate(0.5), gauss.dilate(2.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
