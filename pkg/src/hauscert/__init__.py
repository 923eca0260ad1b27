"""Numerical certification of generalized Hausdorff operators on W^{k,1}.

The package evaluates H_{Phi,A} f(x) = int Phi(y) f(A(y) x) dy, measures
Sobolev W^{k,1} norms over a closed Gaussian-polynomial function family,
and classifies (Phi, A, k) as bounded or unbounded through the condition
integral int |det A(y)|^{-1} (1 + ||A(y)||^k) Phi(y) dy.
"""

from .certifier import (
    Certificate,
    InterchangeReport,
    SobolevNorm,
    blowup_witness,
    certify,
    fd_weak_derivative,
    multi_indices_upto,
    theorem1_kappa,
    verify_interchange,
    wk1_norm,
    wk1_norm_operator_image,
)
from .classical import (
    ClassicalOp,
    adjoint_hardy_kernel,
    adjoint_hardy_point,
    hardy_kernel,
    hardy_point,
    hausdorff_equivalence_check,
    proposition_report,
)
from .errors import HauscertError
from .exprcfg import Expr, eval_expr, parse_expr
from .gaussian import (
    HermiteFactor,
    WitnessFunction,
    hermite_factor_seq,
    shift_threshold,
    witness_derivative,
)
from .hausdorff import (
    AllSpace,
    Annulus,
    ConditionReport,
    Interval,
    KernelSpec,
    apply_point,
    condition_value,
    derivative_formula_point,
    directional_expansion,
    gradient_point,
    hessian_point,
    reduce_conjugate,
    truncate_kernel,
)
from .matrices import (
    ConstantMatrix,
    Decomposed,
    DiagonalInverseNorm,
    ExpressionEntries,
    MatrixFamily,
    cone_measure,
    eta_margin,
    matrix_stats,
    normalize_columns,
    sphere_area,
    unit_ball_volume,
)
from .quadrature import (
    QuadratureResult,
    Status,
    improper_probe,
    integrate_line,
    integrate_space,
)
from .testfuncs import Factor, TestFunction, gauss_product

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
