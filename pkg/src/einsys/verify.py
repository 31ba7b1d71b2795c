"""Self-verification suites over fixed-seed random instances.

Each suite checks one of the load-bearing identities of the library against
an independent reference (plain matrix algebra on unfoldings, or the defining
conditions themselves) and reports its worst residual.  The CLI ``verify``
command and the service ``/verify`` endpoint run all of them and fail on any
out-of-tolerance residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import evd_hermitian, lu, moore_penrose, svd
from .matricize import unfold
from .mlsys import SystemTensor, TensorSequence, contracted_convolve, z_transform_eval
from .tensor import DenseTensor, einstein_product, hermitian

__all__ = ["SuiteResult", "run_verification", "DEFAULT_SEED"]

DEFAULT_SEED = 7041

_LEMMA1_TOL = 1e-12
_DECOMP_TOL = 1e-10


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0xE15))))


def _random_tensor(rng: np.random.Generator, shape: tuple[int, ...]) -> DenseTensor:
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return DenseTensor(a)


def _random_shape(rng: np.random.Generator, order: int, max_dim: int = 3) -> tuple[int, ...]:
    return tuple(int(d) for d in rng.integers(1, max_dim + 1, size=order))


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1e-300)


def _suite_lemma1(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        p = int(rng.integers(1, 3))
        mid = _random_shape(rng, m)
        a = _random_tensor(rng, _random_shape(rng, n) + mid)
        b = _random_tensor(rng, mid + _random_shape(rng, p))
        left = unfold(einstein_product(a, b, m), n).numpy()
        right = unfold(a, n).numpy() @ unfold(b, m).numpy()
        worst = max(worst, _rel(float(np.abs(left - right).max()), float(np.abs(right).max())))
    return SuiteResult("lemma1-homomorphism", cases, worst, _LEMMA1_TOL)


def _suite_penrose(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for i in range(cases):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        row = _random_shape(rng, n)
        col = _random_shape(rng, m)
        a = _random_tensor(rng, row + col)
        if i % 3 == 0:
            # rank-deficient: outer product of two random half-tensors
            u = _random_tensor(rng, row)
            v = _random_tensor(rng, col)
            a = DenseTensor(np.tensordot(u.numpy(), v.numpy(), axes=0))
        pinv = moore_penrose(a, n)
        scale = max(float(np.abs(a.numpy()).max()), float(np.abs(pinv.numpy()).max()))
        c1 = einstein_product(einstein_product(a, pinv, m), a, n) - a
        c2 = einstein_product(einstein_product(pinv, a, n), pinv, m) - pinv
        apa = einstein_product(a, pinv, m)
        c3 = hermitian(apa, n) - apa
        pa = einstein_product(pinv, a, n)
        c4 = hermitian(pa, m) - pa
        for c in (c1, c2, c3, c4):
            worst = max(worst, _rel(float(np.abs(c.numpy()).max()), scale))
    return SuiteResult("moore-penrose-conditions", cases, worst, _DECOMP_TOL)


def _suite_svd(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        a = _random_tensor(rng, _random_shape(rng, n) + _random_shape(rng, m))
        f = svd(a, n)
        back = einstein_product(einstein_product(f.u, f.d, n), hermitian(f.v, m), m)
        worst = max(worst, _rel((back - a).norm(), a.norm()))
    return SuiteResult("svd-reconstruction", cases, worst, _DECOMP_TOL)


def _suite_evd(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 3))
        row = _random_shape(rng, n)
        b = _random_tensor(rng, row + row)
        a = einstein_product(hermitian(b, n), b, n)
        e = evd_hermitian(a)
        back = einstein_product(einstein_product(e.u, e.d, n), hermitian(e.u, n), n)
        worst = max(worst, _rel((back - a).norm(), a.norm()))
    return SuiteResult("evd-reconstruction", cases, worst, _DECOMP_TOL)


def _suite_lu(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 3))
        row = _random_shape(rng, n)
        a = _random_tensor(rng, row + row)
        # diagonal dominance keeps unpivoted elimination stable
        size = unfold(a, n).shape[0]
        boosted = unfold(a, n).numpy() + 4.0 * size * np.eye(size)
        a = DenseTensor(boosted.reshape(row + row, order="F"))
        f = lu(a)
        back = einstein_product(f.l, f.u, n)
        worst = max(worst, _rel((back - a).norm(), a.norm()))
    return SuiteResult("lu-reconstruction", cases, worst, _DECOMP_TOL)


def _suite_convolution_theorem(rng: np.random.Generator, cases: int) -> SuiteResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        in_shape = _random_shape(rng, n)
        out_shape = _random_shape(rng, m)
        h = SystemTensor(
            TensorSequence(
                int(rng.integers(-1, 2)),
                [_random_tensor(rng, out_shape + in_shape) for _ in range(int(rng.integers(1, 4)))],
            ),
            input_order=n,
        )
        x = TensorSequence(
            int(rng.integers(-1, 2)),
            [_random_tensor(rng, in_shape) for _ in range(int(rng.integers(1, 4)))],
        )
        y = contracted_convolve(h, x)
        for q in range(8):
            z = np.exp(2j * np.pi * (q + 0.5) / 8.0)
            lhs = z_transform_eval(y, z)
            rhs = einstein_product(
                z_transform_eval(h.impulse_response, z), z_transform_eval(x, z), n
            )
            scale = max(float(np.abs(rhs.numpy()).max()), 1e-30)
            worst = max(worst, float(np.abs((lhs - rhs).numpy()).max()) / scale)
    return SuiteResult("convolution-theorem", cases, worst, _DECOMP_TOL)


def run_verification(seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    """Run every suite on seed-derived random instances."""
    rng = _rng(seed)
    return [
        _suite_lemma1(rng, 25),
        _suite_penrose(rng, 15),
        _suite_svd(rng, 15),
        _suite_evd(rng, 15),
        _suite_lu(rng, 15),
        _suite_convolution_theorem(rng, 10),
    ]
