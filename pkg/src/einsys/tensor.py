"""Dense complex tensors and the contraction-style products built on them.

The flat storage order is fixed: the linear index of element
``(i_1, ..., i_K)`` (1-based) is ``i_1 + sum_{k>=2} (i_k - 1) * prod_{l<k} I_l``,
i.e. the first mode varies fastest.  This is exactly column-major (Fortran)
order, so matrix unfoldings along a leading/trailing mode split are plain
reshapes of the same buffer.

All mode positions and element indices in the public API are 1-based to match
the usual multi-linear algebra notation; the conversion to 0-based numpy
indexing happens once, inside each entry point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DenseTensor",
    "ModePartition",
    "ModePairing",
    "p_norm",
    "kronecker",
    "contracted_product",
    "einstein_product",
    "inner_product",
    "outer_product",
    "n_mode_product",
    "permute",
    "transpose",
    "hermitian",
    "identity_tensor",
    "is_pseudo_diagonal",
    "is_pseudo_triangular",
    "fiber",
    "tensor_slice",
]

_STRUCTURAL_TOL = 1e-12


def _asfortran(a: np.ndarray) -> np.ndarray:
    # np.asfortranarray promotes 0-d arrays to 1-d; keep scalars order-0
    if a.ndim == 0:
        return a
    return np.asfortranarray(a)


class DenseTensor:
    """Immutable dense tensor of complex double-precision scalars.

    The underlying numpy array is kept Fortran-contiguous and read-only, so
    instances can be shared freely across threads and views (unfoldings,
    slices) never copy.
    """

    __slots__ = ("_a",)

    def __init__(self, values, shape: Sequence[int] | None = None):
        a = np.asarray(values, dtype=np.complex128)
        if shape is not None:
            a = a.reshape(tuple(shape), order="F")
        a = _asfortran(a)
        if a.flags.writeable:
            a = a.copy(order="F")
            a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "DenseTensor":
        """Adopt ``array`` without copying; caller guarantees it is unshared
        or already read-only."""
        t = object.__new__(cls)
        a = _asfortran(array)
        if a.flags.writeable:
            a.flags.writeable = False
        t._a = a
        return t

    @classmethod
    def from_flat(cls, flat, shape: Sequence[int]) -> "DenseTensor":
        """Build a tensor from first-mode-fastest flat data."""
        a = np.asarray(flat, dtype=np.complex128).reshape(tuple(shape), order="F")
        return cls(a)

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> "DenseTensor":
        return cls._wrap(np.zeros(tuple(shape), dtype=np.complex128, order="F"))

    @classmethod
    def ones(cls, shape: Sequence[int]) -> "DenseTensor":
        return cls._wrap(np.ones(tuple(shape), dtype=np.complex128, order="F"))

    # -- structure ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self._a.shape

    @property
    def order(self) -> int:
        return self._a.ndim

    @property
    def size(self) -> int:
        return self._a.size

    @property
    def data(self) -> np.ndarray:
        """Flat data in first-mode-fastest order (read-only view)."""
        return self._a.reshape(-1, order="F")

    def numpy(self) -> np.ndarray:
        """The backing ndarray (read-only)."""
        return self._a

    def at(self, *indices: int) -> complex:
        """Element at 1-based indices."""
        if len(indices) != self.order:
            raise ValueError(f"expected {self.order} indices, got {len(indices)}")
        zero = tuple(i - 1 for i in indices)
        for ax, i in enumerate(zero):
            if not 0 <= i < self._a.shape[ax]:
                raise IndexError(f"index {indices[ax]} out of range for mode {ax + 1}")
        return complex(self._a[zero])

    # -- linear-space operations -------------------------------------------

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        self._check_same_shape(other)
        return DenseTensor._wrap(self._a + other._a)

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        self._check_same_shape(other)
        return DenseTensor._wrap(self._a - other._a)

    def __neg__(self) -> "DenseTensor":
        return DenseTensor._wrap(-self._a)

    def __mul__(self, alpha) -> "DenseTensor":
        return DenseTensor._wrap(self._a * complex(alpha))

    __rmul__ = __mul__

    def __truediv__(self, alpha) -> "DenseTensor":
        return DenseTensor._wrap(self._a / complex(alpha))

    def conj(self) -> "DenseTensor":
        return DenseTensor._wrap(np.conj(self._a))

    def norm(self, p: float = 2) -> float:
        return p_norm(self, p)

    def allclose(self, other: "DenseTensor", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        return self.shape == other.shape and np.allclose(
            self._a, other._a, rtol=rtol, atol=atol
        )

    def _check_same_shape(self, other: "DenseTensor") -> None:
        if not isinstance(other, DenseTensor):
            raise TypeError(f"expected DenseTensor, got {type(other).__name__}")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    # -- diagnostics ---------------------------------------------------------

    def dump(self) -> str:
        """Deterministic textual dump (shape plus flat data) for golden tests."""
        lines = ["shape " + " ".join(str(s) for s in self.shape)]
        for z in self.data:
            lines.append(f"{float(z.real)!r} {float(z.imag)!r}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self.shape})"


@dataclass(frozen=True)
class ModePartition:
    """Split of a tensor's modes into ``n_row`` leading and ``n_col`` trailing
    modes, the bar position of the unfolding map."""

    n_row: int
    n_col: int

    def __post_init__(self):
        if self.n_row < 0 or self.n_col < 0:
            raise ValueError("mode counts must be non-negative")

    @property
    def order(self) -> int:
        return self.n_row + self.n_col


def _as_partition(partition, order: int) -> ModePartition:
    if isinstance(partition, ModePartition):
        p = partition
    elif isinstance(partition, int):
        p = ModePartition(partition, order - partition)
    else:
        n_row, n_col = partition
        p = ModePartition(int(n_row), int(n_col))
    if p.order != order:
        raise ValueError(f"partition {p.n_row}|{p.n_col} does not match order {order}")
    return p


@dataclass(frozen=True)
class ModePairing:
    """Pairs of mode positions (1-based) to contract between two operands."""

    modes_a: tuple[int, ...]
    modes_b: tuple[int, ...]

    def __init__(self, modes_a: Iterable[int], modes_b: Iterable[int]):
        object.__setattr__(self, "modes_a", tuple(int(m) for m in modes_a))
        object.__setattr__(self, "modes_b", tuple(int(m) for m in modes_b))
        if len(self.modes_a) != len(self.modes_b):
            raise ValueError("paired mode lists must have equal length")
        if len(set(self.modes_a)) != len(self.modes_a):
            raise ValueError("repeated mode position in first operand")
        if len(set(self.modes_b)) != len(self.modes_b):
            raise ValueError("repeated mode position in second operand")


def _as_pairing(pairing) -> ModePairing:
    if isinstance(pairing, ModePairing):
        return pairing
    modes_a, modes_b = pairing
    return ModePairing(modes_a, modes_b)


# -- norms and products ------------------------------------------------------


def p_norm(a: DenseTensor, p: float = 2) -> float:
    """Entrywise p-norm; ``p = inf`` gives the max absolute entry."""
    if p == math.inf:
        return float(np.abs(a._a).max())
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    mags = np.abs(a.data)
    if p == 2:
        return float(np.sqrt(np.sum(mags * mags)))
    if p == 1:
        return float(np.sum(mags))
    return float(np.sum(mags**p) ** (1.0 / p))


def kronecker(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Kronecker product of two matrix-shaped tensors."""
    if a.order != 2 or b.order != 2:
        raise ValueError("kronecker requires two order-2 tensors")
    return DenseTensor(np.kron(a._a, b._a))


def contracted_product(a: DenseTensor, b: DenseTensor, pairing) -> DenseTensor:
    """Contract ``a`` and ``b`` along the paired modes.

    Output modes are a's free modes (in order) followed by b's free modes (in
    order); each output element is the sum of products over the paired
    indices.
    """
    pr = _as_pairing(pairing)
    axes_a = []
    axes_b = []
    for ma, mb in zip(pr.modes_a, pr.modes_b):
        if not 1 <= ma <= a.order:
            raise ValueError(f"mode {ma} out of range for order-{a.order} operand")
        if not 1 <= mb <= b.order:
            raise ValueError(f"mode {mb} out of range for order-{b.order} operand")
        if a.shape[ma - 1] != b.shape[mb - 1]:
            raise ValueError(
                f"paired dimensions differ: mode {ma} of A has size {a.shape[ma - 1]},"
                f" mode {mb} of B has size {b.shape[mb - 1]}"
            )
        axes_a.append(ma - 1)
        axes_b.append(mb - 1)
    out = np.tensordot(a._a, b._a, axes=(axes_a, axes_b))
    return DenseTensor(out)


def einstein_product(a: DenseTensor, b: DenseTensor, n: int) -> DenseTensor:
    """Contract the trailing ``n`` modes of ``a`` with the leading ``n`` of ``b``."""
    if n < 0 or n > a.order or n > b.order:
        raise ValueError(f"cannot contract {n} modes of order-{a.order} and order-{b.order} tensors")
    if a.shape[a.order - n :] != b.shape[:n]:
        raise ValueError(
            f"trailing modes {a.shape[a.order - n:]} of A do not match"
            f" leading modes {b.shape[:n]} of B"
        )
    return DenseTensor(np.tensordot(a._a, b._a, axes=n))


def inner_product(a: DenseTensor, b: DenseTensor) -> complex:
    """Sum of elementwise products over identical shapes (no conjugation)."""
    a._check_same_shape(b)
    return complex(np.sum(a._a * b._a))


def outer_product(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Order-(N+M) outer product; the Einstein product with zero contracted modes."""
    return DenseTensor(np.tensordot(a._a, b._a, axes=0))


def n_mode_product(a: DenseTensor, u: DenseTensor, n: int) -> DenseTensor:
    """Multiply every mode-``n`` fiber of ``a`` by the matrix ``u``."""
    if u.order != 2:
        raise ValueError("n-mode product requires a matrix-shaped second operand")
    if not 1 <= n <= a.order:
        raise ValueError(f"mode {n} out of range for order-{a.order} tensor")
    if u.shape[1] != a.shape[n - 1]:
        raise ValueError(
            f"matrix has {u.shape[1]} columns but mode {n} has size {a.shape[n - 1]}"
        )
    out = np.tensordot(a._a, u._a, axes=([n - 1], [1]))
    return DenseTensor(np.moveaxis(out, -1, n - 1))


def permute(a: DenseTensor, sigma: Sequence[int]) -> DenseTensor:
    """Generalized transpose: mode ``k`` of the result is mode ``sigma[k]`` of ``a``."""
    perm = tuple(int(s) for s in sigma)
    if sorted(perm) != list(range(1, a.order + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{a.order}")
    return DenseTensor(np.transpose(a._a, tuple(s - 1 for s in perm)))


def transpose(a: DenseTensor, partition) -> DenseTensor:
    """Block transpose: swap the trailing column modes with the leading row modes."""
    p = _as_partition(partition, a.order)
    axes = tuple(range(p.n_row, a.order)) + tuple(range(p.n_row))
    return DenseTensor(np.transpose(a._a, axes))


def hermitian(a: DenseTensor, partition) -> DenseTensor:
    """Conjugated block transpose under the given row|column partition."""
    p = _as_partition(partition, a.order)
    axes = tuple(range(p.n_row, a.order)) + tuple(range(p.n_row))
    return DenseTensor(np.conj(np.transpose(a._a, axes)))


def identity_tensor(row_shape: Sequence[int]) -> DenseTensor:
    """Order-2N tensor of mode-wise Kronecker deltas, the two-sided unit for
    the Einstein product over tensors with the given row shape."""
    shape = tuple(int(s) for s in row_shape)
    n = int(np.prod(shape)) if shape else 1
    eye = np.eye(n, dtype=np.complex128)
    return DenseTensor(eye.reshape(shape + shape, order="F"))


def _structural_tol(m: np.ndarray, tol: float | None) -> float:
    if tol is not None:
        return tol
    scale = float(np.abs(m).max()) if m.size else 0.0
    return _STRUCTURAL_TOL * scale


def is_pseudo_diagonal(a: DenseTensor, partition, tol: float | None = None) -> bool:
    """True iff the unfolding under ``partition`` is diagonal within ``tol``."""
    from .matricize import unfold

    m = unfold(a, partition).numpy()
    t = _structural_tol(m, tol)
    return bool(np.abs(_zero_diag(m)).max(initial=0.0) <= t)


def _zero_diag(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    k = min(m.shape)
    out[np.arange(k), np.arange(k)] = 0
    return out


def is_pseudo_triangular(a: DenseTensor, lower: bool, tol: float | None = None) -> bool:
    """True iff the unfolding of the square tensor ``a`` is (lower/upper)
    triangular within ``tol``; the pseudo-diagonal belongs to both triangles."""
    from .matricize import unfold

    row_shape = square_row_shape(a)
    m = unfold(a, len(row_shape)).numpy()
    t = _structural_tol(m, tol)
    mask = np.triu(np.ones(m.shape, dtype=bool), 1) if lower else np.tril(
        np.ones(m.shape, dtype=bool), -1
    )
    zeros = np.abs(m[mask])
    return bool(zeros.max(initial=0.0) <= t)


def square_row_shape(a: DenseTensor) -> tuple[int, ...]:
    """Row shape of a square tensor; raises if ``a`` is not square."""
    if a.order % 2 != 0:
        raise ValueError(f"order-{a.order} tensor is not square")
    n = a.order // 2
    if a.shape[:n] != a.shape[n:]:
        raise ValueError(f"tensor with shape {a.shape} is not square")
    return a.shape[:n]


def fiber(a: DenseTensor, mode: int, fixed_indices: Sequence[int]) -> DenseTensor:
    """Mode-``mode`` fiber with all other indices fixed (1-based, in mode order)."""
    if not 1 <= mode <= a.order:
        raise ValueError(f"mode {mode} out of range for order-{a.order} tensor")
    if len(fixed_indices) != a.order - 1:
        raise ValueError(f"expected {a.order - 1} fixed indices, got {len(fixed_indices)}")
    idx: list = []
    fixed = iter(fixed_indices)
    for ax in range(a.order):
        if ax == mode - 1:
            idx.append(slice(None))
        else:
            i = int(next(fixed)) - 1
            if not 0 <= i < a.shape[ax]:
                raise IndexError(f"index {i + 1} out of range for mode {ax + 1}")
            idx.append(i)
    return DenseTensor(a._a[tuple(idx)])


def tensor_slice(a: DenseTensor, free_modes: Sequence[int], fixed_indices: Sequence[int]) -> DenseTensor:
    """Two-dimensional section: keep ``free_modes`` free (in the given order)
    and fix every other index (1-based, in mode order)."""
    m1, m2 = (int(m) for m in free_modes)
    if m1 == m2:
        raise ValueError("free modes must be distinct")
    for m in (m1, m2):
        if not 1 <= m <= a.order:
            raise ValueError(f"mode {m} out of range for order-{a.order} tensor")
    if len(fixed_indices) != a.order - 2:
        raise ValueError(f"expected {a.order - 2} fixed indices, got {len(fixed_indices)}")
    idx: list = []
    fixed = iter(fixed_indices)
    for ax in range(a.order):
        if ax in (m1 - 1, m2 - 1):
            idx.append(slice(None))
        else:
            i = int(next(fixed)) - 1
            if not 0 <= i < a.shape[ax]:
                raise IndexError(f"index {i + 1} out of range for mode {ax + 1}")
            idx.append(i)
    section = a._a[tuple(idx)]
    if m1 > m2:
        section = section.T
    return DenseTensor(section)
