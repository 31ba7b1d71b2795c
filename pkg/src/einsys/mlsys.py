"""Discrete and sampled-continuous multi-linear time-invariant systems.

A signal is a finite-support sequence of equal-shape tensors.  A system is an
impulse-response sequence whose frames have the output modes first and the
input modes last; it acts on a signal through the contracted convolution

    y[k] = sum_n h[n] *_N x[k - n]

computed here by direct summation over the two finite supports.  Sequences may
carry a uniform sample step, in which case the convolution picks up a factor
of the step (Riemann approximation of the continuous-time integral) and the
stability statistic integrates rather than sums.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .matricize import unfold
from .tensor import DenseTensor, einstein_product

__all__ = [
    "TensorSequence",
    "SystemTensor",
    "contracted_convolve",
    "z_transform_eval",
    "dtft_eval",
    "bibo_statistic_discrete",
    "bibo_statistic_sampled_continuous",
    "sup_norm",
]


class TensorSequence:
    """Finite-support map from integer time index to equal-shape tensors."""

    __slots__ = ("_k_min", "_frames", "_sample_step")

    def __init__(
        self,
        k_min: int,
        frames: Sequence[DenseTensor],
        sample_step: float | None = None,
    ):
        frames = tuple(frames)
        if not frames:
            raise ValueError("support must be non-empty")
        shape = frames[0].shape
        for f in frames[1:]:
            if f.shape != shape:
                raise ValueError(f"frame shape {f.shape} differs from {shape}")
        if sample_step is not None and not sample_step > 0:
            raise ValueError("sample_step must be positive")
        self._k_min = int(k_min)
        self._frames = frames
        self._sample_step = sample_step

    @property
    def k_min(self) -> int:
        return self._k_min

    @property
    def k_max(self) -> int:
        return self._k_min + len(self._frames) - 1

    @property
    def support(self) -> range:
        return range(self.k_min, self.k_max + 1)

    @property
    def frames(self) -> tuple[DenseTensor, ...]:
        return self._frames

    @property
    def shape(self) -> tuple[int, ...]:
        return self._frames[0].shape

    @property
    def sample_step(self) -> float | None:
        return self._sample_step

    def frame(self, k: int) -> DenseTensor:
        """Frame at absolute index ``k``; zero outside the stored support."""
        if self.k_min <= k <= self.k_max:
            return self._frames[k - self.k_min]
        return DenseTensor.zeros(self.shape)

    def shifted(self, d: int) -> "TensorSequence":
        """The sequence delayed by ``d`` samples."""
        return TensorSequence(self.k_min + d, self._frames, self._sample_step)

    def __repr__(self) -> str:
        step = f", sample_step={self._sample_step}" if self._sample_step else ""
        return f"TensorSequence(shape={self.shape}, support=[{self.k_min}, {self.k_max}]{step})"


class SystemTensor:
    """Impulse-response sequence coupling order-N inputs to order-M outputs.

    Frame shape is ``output_shape + input_shape``: the trailing ``input_order``
    modes contract with the signal at every lag.
    """

    __slots__ = ("_ir", "_n_in", "_n_out")

    def __init__(
        self,
        impulse_response: TensorSequence,
        input_order: int,
        output_order: int | None = None,
    ):
        frame_order = len(impulse_response.shape)
        if output_order is None:
            output_order = frame_order - input_order
        if input_order < 0 or output_order < 0 or input_order + output_order != frame_order:
            raise ValueError(
                f"input order {input_order} + output order {output_order}"
                f" must equal frame order {frame_order}"
            )
        self._ir = impulse_response
        self._n_in = int(input_order)
        self._n_out = int(output_order)

    @property
    def impulse_response(self) -> TensorSequence:
        return self._ir

    @property
    def input_order(self) -> int:
        return self._n_in

    @property
    def output_order(self) -> int:
        return self._n_out

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self._ir.shape[self._n_out :]

    @property
    def output_shape(self) -> tuple[int, ...]:
        return self._ir.shape[: self._n_out]

    def __repr__(self) -> str:
        return (
            f"SystemTensor(output_shape={self.output_shape},"
            f" input_shape={self.input_shape}, support=[{self._ir.k_min}, {self._ir.k_max}])"
        )


def _combined_step(h_step: float | None, x_step: float | None) -> float | None:
    if h_step is None and x_step is None:
        return None
    if h_step is None or x_step is None:
        raise ValueError("inconsistent sample_step: one operand is sampled, the other discrete")
    if h_step != x_step:
        raise ValueError(f"inconsistent sample_step: {h_step} vs {x_step}")
    return h_step


def contracted_convolve(h: SystemTensor, x: TensorSequence) -> TensorSequence:
    """Contracted convolution of a system with a signal.

    Output support is the Minkowski sum of the operand supports.  When both
    operands carry a sample step the result is scaled by it.
    """
    if x.shape != h.input_shape:
        raise ValueError(f"signal shape {x.shape} does not match system input {h.input_shape}")
    step = _combined_step(h.impulse_response.sample_step, x.sample_step)
    n = h.input_order
    hf = h.impulse_response.frames
    xf = x.frames
    out_shape = h.output_shape
    acc = [np.zeros(out_shape, dtype=np.complex128) for _ in range(len(hf) + len(xf) - 1)]
    for i, hframe in enumerate(hf):
        ha = hframe.numpy()
        for j, xframe in enumerate(xf):
            acc[i + j] = acc[i + j] + np.tensordot(ha, xframe.numpy(), axes=n)
    if step is not None:
        acc = [a * step for a in acc]
    k_min = h.impulse_response.k_min + x.k_min
    return TensorSequence(k_min, [DenseTensor(a) for a in acc], step)


def z_transform_eval(x: TensorSequence, z: complex) -> DenseTensor:
    """Evaluate ``sum_n x[n] z^-n`` elementwise at one point ``z``."""
    z = complex(z)
    if z == 0 and x.k_max > 0:
        raise ZeroDivisionError("z = 0 requires negative powers for positive-time frames")
    acc = np.zeros(x.shape, dtype=np.complex128)
    for n, frame in zip(x.support, x.frames):
        acc = acc + frame.numpy() * z ** (-n)
    return DenseTensor(acc)


def dtft_eval(x: TensorSequence, omega: float) -> DenseTensor:
    """Discrete-time Fourier transform: the z-transform on the unit circle."""
    return z_transform_eval(x, np.exp(1j * float(omega)))


def _absolute_sums_per_output(h: SystemTensor) -> np.ndarray:
    """Sum of |entries| over all input indices and all lags, one value per
    output index (flattened first-mode-fastest)."""
    part = (h.output_order, h.input_order)
    total = None
    for frame in h.impulse_response.frames:
        m = np.abs(unfold(frame, part).numpy())
        row = m.sum(axis=1)
        total = row if total is None else total + row
    return total


def bibo_statistic_discrete(h: SystemTensor) -> float:
    """Worst-case gain of a discrete system: the max over output indices of
    the absolute sum of the impulse response over lags and input indices.

    Finite supports always give a finite value, and the value bounds the
    output: ``sup-norm(y) <= stat * sup-norm(x)`` for every bounded input.
    (A finite statistic is equivalent to absolute summability of every
    impulse-response entry, the stability criterion; taking the max over the
    output rather than the input indices is what makes the constant itself a
    valid gain bound.)
    """
    return float(_absolute_sums_per_output(h).max())


def bibo_statistic_sampled_continuous(h: SystemTensor) -> float:
    """Riemann approximation of the continuous stability statistic: the
    discrete absolute sums scaled by the sample step."""
    step = h.impulse_response.sample_step
    if step is None:
        raise ValueError("sampled-continuous statistic requires a sample_step")
    return float(step * _absolute_sums_per_output(h).max())


def sup_norm(x: TensorSequence) -> float:
    """Peak amplitude over all components and all times."""
    return max(float(np.abs(f.numpy()).max()) for f in x.frames)
