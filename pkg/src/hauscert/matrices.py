"""Matrix families A(y), norms, eta margins and cone surface measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonFiniteEntries,
    SingularColumn,
    SingularConstantPart,
    SingularMatrix,
)

__all__ = [
    "MatrixFamily",
    "DiagonalInverseNorm",
    "ConstantMatrix",
    "ExpressionEntries",
    "Decomposed",
    "MatrixStats",
    "matrix_stats",
    "eta_margin",
    "normalize_columns",
    "cone_measure",
    "sphere_area",
    "unit_ball_volume",
]


class MatrixFamily:
    """Map y -> A(y), an n x n matrix."""

    dim: int

    def __call__(self, y):
        raise NotImplementedError

    @property
    def is_radial(self):
        """True when A(y) depends on y only through |y|."""
        return False


@dataclass(frozen=True)
class DiagonalInverseNorm(MatrixFamily):
    """A(y) = diag(1/|y|, ..., 1/|y|), the classical Hausdorff choice."""

    dim: int

    def __call__(self, y):
        r = float(np.linalg.norm(np.asarray(y, dtype=float)))
        if r == 0.0:
            raise SingularMatrix("A(y) undefined at y = 0")
        return np.eye(self.dim) / r

    @property
    def is_radial(self):
        return True


class ConstantMatrix(MatrixFamily):
    def __init__(self, entries):
        matrix = np.asarray(entries, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("entries must form a square matrix")
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteEntries("constant matrix has non-finite entries")
        self.matrix = matrix
        self.dim = matrix.shape[0]

    def __call__(self, y):
        return self.matrix

    @property
    def is_radial(self):
        return True


class ExpressionEntries(MatrixFamily):
    """n x n grid of exprcfg expressions evaluated entrywise at y."""

    def __init__(self, dim, grid):
        if len(grid) != dim or any(len(row) != dim for row in grid):
            raise ValueError("grid must be n x n")
        self.dim = dim
        self.grid = tuple(tuple(row) for row in grid)

    def __call__(self, y):
        out = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                out[i, j] = self.grid[i][j](y)
        return out

    @property
    def is_radial(self):
        return all(e.uses_only_norm() for row in self.grid for e in row)


class Decomposed(MatrixFamily):
    """A(y) = Lambda P(y) Q with constant nonsingular Lambda, Q."""

    def __init__(self, lam, inner, q):
        lam = np.asarray(lam, dtype=float)
        q = np.asarray(q, dtype=float)
        if abs(np.linalg.det(lam)) < 1e-14 or abs(np.linalg.det(q)) < 1e-14:
            raise SingularConstantPart("Lambda and Q must be nonsingular")
        self.lam = lam
        self.q = q
        self.inner = inner
        self.dim = inner.dim

    def __call__(self, y):
        return self.lam @ self.inner(y) @ self.q

    @property
    def is_radial(self):
        return self.inner.is_radial

    def validate_nonneg(self, samples, tol=1e-12):
        """Sampled nonnegativity of the inner factor's entries on supp Phi."""
        for y in samples:
            if np.min(self.inner(y)) < -tol:
                return False
        return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixStats:
    fro: float
    opn: float
    det: float
    colnorms: tuple


def _lu_det(matrix):
    """Determinant via LU with partial pivoting."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    det = 1.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            return 0.0
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            det = -det
        det *= a[col, col]
        a[col + 1:, col:] = a[col + 1:, col:] - np.outer(
            a[col + 1:, col] / a[col, col], a[col, col:])
    return det

def _power_opnorm(matrix, rtol=1e-10, maxiter=10_000):
    """Largest singular value via power iteration on B^T B."""
    n = matrix.shape[0]
    gram = matrix.T @ matrix
    v = np.ones(n) + 1e-3 * np.arange(n)  # deterministic, generic start
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(maxiter):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        est = float(v @ gram @ v)
        if abs(est - prev) <= rtol * max(est, 1e-300):
            prev = est
            break
        prev = est
    return math.sqrt(max(prev, 0.0))


def matrix_stats(matrix):
    b = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(b)):
        raise NonFiniteEntries("matrix has non-finite entries")
    fro = float(np.sqrt(np.sum(b * b)))
    colnorms = tuple(float(np.linalg.norm(b[:, j])) for j in range(b.shape[1]))
    return MatrixStats(fro=fro, opn=_power_opnorm(b), det=_lu_det(b),
                       colnorms=colnorms)


def eta_margin(fam, samples):
    """min over samples of |det A(y)| / prod_j ||A_j(y)||."""
    margin = math.inf
    for y in samples:
        a = fam(y)
        stats = matrix_stats(a)
        prod = 1.0
        for c in stats.colnorms:
            if c == 0.0:
                raise SingularColumn(f"zero column norm at y = {y}")
            prod *= c
        margin = min(margin, abs(stats.det) / prod)
    return margin


def normalize_columns(matrix):
    """Columns scaled to A_j / (n ||A_j||); Frobenius norm becomes 1/sqrt(n)."""
    b = np.asarray(matrix, dtype=float)
    n = b.shape[0]
    out = np.empty_like(b)
    for j in range(n):
        norm = np.linalg.norm(b[:, j])
        if norm == 0.0:
            raise SingularColumn(f"column {j} has zero norm")
        out[:, j] = b[:, j] / (n * norm)
    return out


def sphere_area(n):
    """Surface area of S^{n-1}."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def cone_measure(matrix, n_samples, seed, batch=200_000):
    """Monte Carlo sigma(B Omega intersect S^{n-1}), Omega = (0, inf)^n.

    Uniform sphere points are tested for B^{-1} u > 0 componentwise; the hit
    fraction is scaled by the total sphere area.  Deterministic given seed.
    """
    b = np.asarray(matrix, dtype=float)
    n = b.shape[0]
    if abs(_lu_det(b)) == 0.0:
        raise SingularMatrix("cone measure requires an invertible matrix")
    binv = np.linalg.inv(b)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_samples:
        m = min(batch, n_samples - done)
        u = rng.standard_normal((m, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        hits += int(np.count_nonzero(np.all(u @ binv.T > 0.0, axis=1)))
        done += m
    area = sphere_area(n)
    p = hits / n_samples
    estimate = area * p
    stderr = area * math.sqrt(max(p * (1.0 - p), 1e-300) / n_samples)
    return {"estimate": estimate, "stderr": stderr}
