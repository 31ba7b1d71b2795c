"""Tensor decompositions and scalar functionals via the unfolding isomorphism.

Every factorization here unfolds its input, runs a dense matrix algorithm,
and folds the factors back, which is exact because the unfolding is a product
homomorphism.  SVD and Hermitian EVD delegate to LAPACK through numpy; the
LU factorization is a hand-rolled Doolittle elimination because the
pseudo-triangular framework has no permutation tensor, so partial pivoting is
not available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matricize import fold, unfold
from .tensor import (
    DenseTensor,
    _as_partition,
    einstein_product,
    hermitian,
    square_row_shape,
)

__all__ = [
    "TensorSvd",
    "TensorEvd",
    "TensorLu",
    "SingularTensorError",
    "LuDecompositionError",
    "svd",
    "evd_hermitian",
    "inverse",
    "moore_penrose",
    "lu",
    "lu_solve",
    "trace",
    "determinant",
    "is_psd",
    "sqrt_psd",
    "inv_pd",
]

_EPS = float(np.finfo(np.float64).eps)
_HERMITIAN_RTOL = 1e-10
_PSD_TOL = 1e-10


class SingularTensorError(np.linalg.LinAlgError):
    """The unfolding of a square tensor is singular or numerically so."""


class LuDecompositionError(np.linalg.LinAlgError):
    """Doolittle elimination hit a zero or tiny pivot; LU is inapplicable."""


@dataclass(frozen=True)
class TensorSvd:
    """Factors ``a = u *_N d *_M hermitian(v)`` with unitary ``u``, ``v`` and
    pseudo-diagonal ``d``; singular values sorted non-increasing."""

    u: DenseTensor
    d: DenseTensor
    v: DenseTensor
    singular_values: np.ndarray


@dataclass(frozen=True)
class TensorEvd:
    """Factors ``a = u *_N d *_N hermitian(u)`` of a Hermitian square tensor;
    eigenvalues real, sorted non-increasing."""

    u: DenseTensor
    d: DenseTensor
    eigenvalues: np.ndarray

    def eigentensor(self, k: int) -> DenseTensor:
        """k-th (1-based) eigentensor: column k of the unfolded ``u`` folded
        back to the row shape."""
        row_shape = square_row_shape(self.u)
        um = unfold(self.u, len(row_shape))
        col = um.numpy()[:, k - 1]
        return DenseTensor(col.reshape(row_shape, order="F"))


@dataclass(frozen=True)
class TensorLu:
    """Factors ``a = l *_N u`` with unit pseudo-diagonal pseudo-lower ``l``
    and pseudo-upper ``u``."""

    l: DenseTensor
    u: DenseTensor


def _fix_phases(u: np.ndarray, vh: np.ndarray | None) -> tuple[np.ndarray, np.ndarray | None]:
    """Deterministic phase convention: the largest-magnitude component of each
    left singular/eigen vector is made real and positive, compensated on the
    matching row of ``vh``; leftover rows of ``vh`` get the same rule applied
    to themselves."""
    u = u.copy()
    vh = vh.copy() if vh is not None else None
    k = min(u.shape[1], vh.shape[0]) if vh is not None else u.shape[1]
    for j in range(u.shape[1]):
        m = int(np.argmax(np.abs(u[:, j])))
        pivot = u[m, j]
        if abs(pivot) == 0.0:
            continue
        phase = pivot / abs(pivot)
        u[:, j] /= phase
        if vh is not None and j < k:
            vh[j, :] *= phase
    if vh is not None:
        for j in range(k, vh.shape[0]):
            m = int(np.argmax(np.abs(vh[j, :])))
            pivot = vh[j, m]
            if abs(pivot) == 0.0:
                continue
            vh[j, :] /= pivot / abs(pivot)
    return u, vh


def svd(a: DenseTensor, partition) -> TensorSvd:
    """Singular value decomposition under the given row|column partition."""
    p = _as_partition(partition, a.order)
    row_shape = a.shape[: p.n_row]
    col_shape = a.shape[p.n_row :]
    m = unfold(a, p).numpy()
    um, s, vh = np.linalg.svd(m, full_matrices=True)
    um, vh = _fix_phases(um, vh)
    d = np.zeros(m.shape, dtype=np.complex128)
    d[np.diag_indices(s.size)] = s
    return TensorSvd(
        u=fold(DenseTensor(um), row_shape, row_shape),
        d=fold(DenseTensor(d), row_shape, col_shape),
        v=fold(DenseTensor(vh.conj().T), col_shape, col_shape),
        singular_values=s,
    )


def _check_hermitian(m: np.ndarray) -> None:
    scale = float(np.abs(m).max(initial=0.0))
    if float(np.abs(m - m.conj().T).max(initial=0.0)) > _HERMITIAN_RTOL * max(scale, 1.0):
        raise ValueError("tensor is not Hermitian within tolerance")


def evd_hermitian(a: DenseTensor) -> TensorEvd:
    """Eigendecomposition of a Hermitian square tensor."""
    row_shape = square_row_shape(a)
    m = unfold(a, len(row_shape)).numpy()
    _check_hermitian(m)
    w, um = np.linalg.eigh(m)
    w = w[::-1].copy()
    um = um[:, ::-1]
    um, _ = _fix_phases(um, None)
    d = np.diag(w.astype(np.complex128))
    return TensorEvd(
        u=fold(DenseTensor(um), row_shape, row_shape),
        d=fold(DenseTensor(d), row_shape, row_shape),
        eigenvalues=w,
    )


def inverse(a: DenseTensor) -> DenseTensor:
    """Einstein-product inverse of a square tensor."""
    row_shape = square_row_shape(a)
    m = unfold(a, len(row_shape)).numpy()
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= s[0] * max(m.shape) * _EPS or s[0] == 0.0:
        raise SingularTensorError(
            f"unfolding is singular to working precision (condition ~ {s[0] / max(s[-1], np.finfo(float).tiny):.2e})"
        )
    inv = np.linalg.solve(m, np.eye(m.shape[0], dtype=np.complex128))
    return fold(DenseTensor(inv), row_shape, row_shape)


def moore_penrose(a: DenseTensor, partition) -> DenseTensor:
    """Moore-Penrose pseudo-inverse via SVD with the standard cutoff
    ``sigma < max(rows, cols) * eps * sigma_max``."""
    p = _as_partition(partition, a.order)
    row_shape = a.shape[: p.n_row]
    col_shape = a.shape[p.n_row :]
    m = unfold(a, p).numpy()
    pinv = np.linalg.pinv(m, rcond=max(m.shape) * _EPS)
    return fold(DenseTensor(pinv), col_shape, row_shape)


def lu(a: DenseTensor) -> TensorLu:
    """Doolittle LU factorization of a square tensor, without pivoting."""
    row_shape = square_row_shape(a)
    m = unfold(a, len(row_shape)).numpy()
    n = m.shape[0]
    scale = float(np.abs(m).max(initial=0.0))
    pivot_tol = n * _EPS * max(scale, 1.0) if scale else 0.0
    lm = np.eye(n, dtype=np.complex128)
    um = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        um[k, k:] = m[k, k:] - lm[k, :k] @ um[:k, k:]
        pivot = um[k, k]
        if abs(pivot) <= pivot_tol:
            raise LuDecompositionError(
                f"LU inapplicable: pivot {k + 1} has magnitude {abs(pivot):.2e}"
            )
        if k + 1 < n:
            lm[k + 1 :, k] = (m[k + 1 :, k] - lm[k + 1 :, :k] @ um[:k, k]) / pivot
    return TensorLu(
        l=fold(DenseTensor(lm), row_shape, row_shape),
        u=fold(DenseTensor(um), row_shape, row_shape),
    )


def lu_solve(fac: TensorLu, b: DenseTensor) -> DenseTensor:
    """Solve ``a *_N x = b`` from the factors of ``a``: forward substitution
    on the lower factor, then backward on the upper, in linear-index order."""
    row_shape = square_row_shape(fac.l)
    n_row = len(row_shape)
    if b.shape[:n_row] != row_shape:
        raise ValueError(
            f"leading modes of b {b.shape[:n_row]} do not match system row shape {row_shape}"
        )
    lm = unfold(fac.l, n_row).numpy()
    um = unfold(fac.u, n_row).numpy()
    bm = unfold(b, (n_row, b.order - n_row)).numpy()
    n = lm.shape[0]
    y = np.zeros_like(bm)
    for i in range(n):
        y[i] = (bm[i] - lm[i, :i] @ y[:i]) / lm[i, i]
    x = np.zeros_like(bm)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - um[i, i + 1 :] @ x[i + 1 :]) / um[i, i]
    return fold(DenseTensor(x), row_shape, b.shape[n_row:])


def trace(a: DenseTensor) -> complex:
    """Sum of the pseudo-diagonal entries of a square tensor."""
    row_shape = square_row_shape(a)
    return complex(np.trace(unfold(a, len(row_shape)).numpy()))


def determinant(a: DenseTensor) -> complex:
    """Determinant of a square tensor, equal to its unfolding determinant."""
    row_shape = square_row_shape(a)
    return complex(np.linalg.det(unfold(a, len(row_shape)).numpy()))


def is_psd(a: DenseTensor, tol: float = _PSD_TOL) -> bool:
    """True iff ``a`` is Hermitian with eigenvalues >= -tol (scaled)."""
    w = evd_hermitian(a).eigenvalues
    bound = tol * max(1.0, float(np.abs(w).max()))
    return bool(w.min() >= -bound)


def sqrt_psd(a: DenseTensor) -> DenseTensor:
    """Positive semi-definite square root ``a^(1/2)`` with
    ``a^(1/2) *_N a^(1/2) = a``."""
    e = evd_hermitian(a)
    w = e.eigenvalues
    bound = _PSD_TOL * max(1.0, float(np.abs(w).max()))
    if w.min() < -bound:
        raise ValueError("tensor is not positive semi-definite")
    root = np.sqrt(np.clip(w, 0.0, None))
    return _recompose(e.u, root)


def inv_pd(a: DenseTensor) -> DenseTensor:
    """Inverse of a Hermitian positive definite tensor via its EVD."""
    e = evd_hermitian(a)
    w = e.eigenvalues
    bound = _PSD_TOL * max(1.0, float(np.abs(w).max()))
    if w.min() <= bound:
        raise ValueError("tensor is not positive definite")
    return _recompose(e.u, 1.0 / w)


def _recompose(u: DenseTensor, diag_values: np.ndarray) -> DenseTensor:
    row_shape = square_row_shape(u)
    n_row = len(row_shape)
    d = fold(DenseTensor(np.diag(diag_values.astype(np.complex128))), row_shape, row_shape)
    return einstein_product(einstein_product(u, d, n_row), hermitian(u, n_row), n_row)
