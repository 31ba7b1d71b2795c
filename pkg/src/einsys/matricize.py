"""The bijective tensor-to-matrix unfolding and its inverse.

``unfold`` sends an order-(N+M) tensor to the (prod of row dims) x (prod of
col dims) matrix whose row index is the first-mode-fastest linearization of
the leading N indices and whose column index linearizes the trailing M
indices the same way.  Because the flat storage order of
:class:`~einsys.tensor.DenseTensor` uses the same linearization, both
directions are O(1) metadata reshapes; no element is moved or copied.

The map is a linear-space isomorphism, and it turns the Einstein product into
the ordinary matrix product: ``unfold(A *_M B) = unfold(A) @ unfold(B)`` for
conformable operands.  That homomorphism is the computational route for every
decomposition in :mod:`einsys.decomp`.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .tensor import DenseTensor, _as_partition

__all__ = ["unfold", "fold"]


def unfold(a: DenseTensor, partition) -> DenseTensor:
    """Matrix unfolding of ``a`` under a (n_row | n_col) mode partition.

    ``partition`` may be a :class:`ModePartition`, a ``(n_row, n_col)`` pair,
    or just ``n_row``.
    """
    p = _as_partition(partition, a.order)
    rows = int(np.prod(a.shape[: p.n_row], dtype=np.int64)) if p.n_row else 1
    cols = int(np.prod(a.shape[p.n_row :], dtype=np.int64)) if p.n_col else 1
    m = a.numpy().reshape((rows, cols), order="F")
    return DenseTensor._wrap(m)


def fold(m: DenseTensor, row_shape: Sequence[int], col_shape: Sequence[int]) -> DenseTensor:
    """Inverse unfolding: reshape a matrix back to ``row_shape + col_shape``."""
    if m.order != 2:
        raise ValueError("fold expects a matrix-shaped tensor")
    row_shape = tuple(int(s) for s in row_shape)
    col_shape = tuple(int(s) for s in col_shape)
    rows = int(np.prod(row_shape, dtype=np.int64)) if row_shape else 1
    cols = int(np.prod(col_shape, dtype=np.int64)) if col_shape else 1
    if m.shape != (rows, cols):
        raise ValueError(
            f"matrix shape {m.shape} does not match target {(rows, cols)}"
            f" from row shape {row_shape} and column shape {col_shape}"
        )
    t = m.numpy().reshape(row_shape + col_shape, order="F")
    return DenseTensor._wrap(t)
