"""Shared test utilities: random tensors and brute-force oracles.

The loop oracle below is the independent reference for every contraction op:
plain Python loops over explicit index tuples, no reshape/transpose/BLAS
machinery shared with the implementation under test.
"""

from __future__ import annotations

import itertools

import numpy as np

from einsys import DenseTensor


def random_tensor(rng: np.random.Generator, shape, real: bool = False) -> DenseTensor:
    a = rng.standard_normal(shape)
    if not real:
        a = a + 1j * rng.standard_normal(shape)
    return DenseTensor(a)


def random_shape(rng: np.random.Generator, order: int, max_dim: int = 3) -> tuple[int, ...]:
    return tuple(int(d) for d in rng.integers(1, max_dim + 1, size=order))


def loop_contracted_product(a: DenseTensor, b: DenseTensor, modes_a, modes_b) -> DenseTensor:
    """Nested-loop contraction: sum over the paired 1-based modes, output is
    a's free modes followed by b's free modes."""
    an, bn = a.numpy(), b.numpy()
    free_a = [m for m in range(1, a.order + 1) if m not in modes_a]
    free_b = [m for m in range(1, b.order + 1) if m not in modes_b]
    out_shape = tuple(a.shape[m - 1] for m in free_a) + tuple(b.shape[m - 1] for m in free_b)
    paired = [a.shape[m - 1] for m in modes_a]
    out = np.zeros(out_shape, dtype=np.complex128)
    for out_idx in itertools.product(*(range(s) for s in out_shape)):
        ia = [0] * a.order
        ib = [0] * b.order
        for pos, m in enumerate(free_a):
            ia[m - 1] = out_idx[pos]
        for pos, m in enumerate(free_b):
            ib[m - 1] = out_idx[len(free_a) + pos]
        total = 0.0 + 0.0j
        for sum_idx in itertools.product(*(range(s) for s in paired)):
            for pos, m in enumerate(modes_a):
                ia[m - 1] = sum_idx[pos]
            for pos, m in enumerate(modes_b):
                ib[m - 1] = sum_idx[pos]
            total += complex(an[tuple(ia)]) * complex(bn[tuple(ib)])
        out[out_idx] = total
    return DenseTensor(out)


def loop_einstein_product(a: DenseTensor, b: DenseTensor, n: int) -> DenseTensor:
    modes_a = list(range(a.order - n + 1, a.order + 1))
    modes_b = list(range(1, n + 1))
    return loop_contracted_product(a, b, modes_a, modes_b)


def max_abs(t: DenseTensor) -> float:
    return float(np.abs(t.numpy()).max(initial=0.0))


def rel_err(got: DenseTensor, want: DenseTensor) -> float:
    scale = max(max_abs(want), 1e-300)
    return float(np.abs(got.numpy() - want.numpy()).max(initial=0.0)) / scale
