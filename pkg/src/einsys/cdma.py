"""MIMO-CDMA uplink Monte-Carlo simulator.

K users with n_tx antennas each transmit Gray-mapped QAM symbols, spread by
length-L quaternary sequences, through i.i.d. Rayleigh MIMO channels to an
n_rx-antenna base station.  Three receivers are compared on BER and NMSE:

* ``LMMSE1`` -- two-stage matrix receiver, LMMSE against the channel followed
  by a decorrelator against the spreading matrix;
* ``LMMSE2`` -- two-stage, LMMSE in both stages;
* ``TML_MMSE`` -- joint MMSE receiver acting as an order-4 tensor across the
  user, antenna, receive and code dimensions simultaneously.

Randomness is counter-based: every (point, realization, role) tuple opens its
own Philox stream derived from the master seed, and per-realization results
are reduced in realization order, so serial and threaded runs produce
bit-identical output.  Gaussian variates come from a Box-Muller transform of
the unit-interval stream; each complex sample uses independent real and
imaginary parts of half the requested variance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .decomp import SingularTensorError, inverse
from .tensor import DenseTensor, einstein_product, hermitian, identity_tensor

__all__ = [
    "RECEIVERS",
    "CdmaConfig",
    "CdmaResult",
    "ChannelSet",
    "SpreadingSet",
    "qam_constellation",
    "complex_normal",
    "gen_channel",
    "gen_spreading",
    "equivalent_channel",
    "transmit",
    "receiver_matrix_a",
    "receiver_matrix_b",
    "receiver_matrices",
    "nearest_symbol_indices",
    "decode_two_stage",
    "tml_mmse",
    "run_monte_carlo",
]

RECEIVERS = ("LMMSE1", "LMMSE2", "TML_MMSE")

_EPS = float(np.finfo(np.float64).eps)

_ROLE_CHANNEL = 0
_ROLE_SPREADING = 1
_ROLE_SYMBOLS = 2
_ROLE_NOISE = 3


# -- randomness ---------------------------------------------------------------


def _stream(master_seed: int, point: int, realization: int, role: int) -> np.random.Generator:
    """Independent Philox stream keyed by (seed, point, realization, role)."""
    ss = np.random.SeedSequence((int(master_seed), int(point), int(realization), int(role)))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, shape: Sequence[int], variance: float) -> np.ndarray:
    """Circular complex Gaussian samples of the given total variance,
    generated by Box-Muller from the generator's unit-interval stream."""
    shape = tuple(int(s) for s in shape)
    n = int(np.prod(shape, dtype=np.int64)) if shape else 1
    u1 = 1.0 - rng.random(n)  # (0, 1]: keeps the log finite
    u2 = rng.random(n)
    z = np.sqrt(-variance * np.log(u1)) * np.exp(2j * np.pi * u2)
    return z.reshape(shape, order="F")


# -- constellations -----------------------------------------------------------


def _gray_decode(g: int) -> int:
    mask = g >> 1
    while mask:
        g ^= mask
        mask >>= 1
    return g


def qam_constellation(name: str) -> tuple[np.ndarray, int]:
    """Gray-mapped square QAM with unit average energy.

    Returns the symbol table indexed by the transmitted bit pattern (high
    bits on the in-phase axis) and the number of bits per symbol.  With Gray
    labeling per axis, nearest-neighbour decision errors cost one bit.
    """
    if not name.startswith("qam"):
        raise ValueError(f"unknown constellation {name!r}")
    m = int(name[3:])
    side = math.isqrt(m)
    if side * side != m or m < 4:
        raise ValueError(f"constellation {name!r} is not square QAM")
    bits_axis = side.bit_length() - 1
    if 1 << bits_axis != side:
        raise ValueError(f"constellation {name!r} side is not a power of two")
    d = math.sqrt(3.0 / (2.0 * (m - 1)))
    levels = np.array([(2 * t - side + 1) * d for t in range(side)])
    symbols = np.empty(m, dtype=np.complex128)
    for p in range(m):
        t_re = _gray_decode(p >> bits_axis)
        t_im = _gray_decode(p & (side - 1))
        symbols[p] = levels[t_re] + 1j * levels[t_im]
    return symbols, 2 * bits_axis


# -- configuration and results ------------------------------------------------


@dataclass(frozen=True)
class CdmaConfig:
    """Experiment parameters; defaults reproduce the SNR-sweep setup
    (L=32, K=4, n_tx=4, n_rx=32)."""

    spreading_length: int = 32
    n_users: int = 4
    n_tx: int = 4
    n_rx: int = 32
    snr_db_grid: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    user_grid: tuple[int, ...] | None = None
    fixed_snr_db: tuple[float, float] = (5.0, 8.0)
    es: float = 1.0
    constellation: str = "qam4"
    min_bit_errors: int = 100
    n_channel_realizations: int = 100
    frames_per_realization: int = 150
    max_bits_per_point: int = 10_000_000
    master_seed: int = 0
    n_threads: int | None = None

    def __post_init__(self):
        for name in ("spreading_length", "n_users", "n_tx", "n_rx", "min_bit_errors",
                     "n_channel_realizations", "frames_per_realization", "max_bits_per_point"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.es <= 0:
            raise ValueError("es must be positive")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative integer")
        if self.n_threads is not None and self.n_threads <= 0:
            raise ValueError("n_threads must be positive when given")
        object.__setattr__(self, "snr_db_grid", tuple(float(s) for s in self.snr_db_grid))
        if self.user_grid is not None:
            object.__setattr__(self, "user_grid", tuple(int(k) for k in self.user_grid))
        object.__setattr__(self, "fixed_snr_db", tuple(float(s) for s in self.fixed_snr_db))
        qam_constellation(self.constellation)
        max_users = max(self.user_grid) if self.user_grid else self.n_users
        streams = max_users * self.n_tx
        if streams > min(self.n_rx, self.spreading_length):
            raise ValueError(
                f"K*n_tx = {streams} exceeds min(n_rx, L) ="
                f" {min(self.n_rx, self.spreading_length)}; decorrelator would be singular"
            )
        if not (self.user_grid or self.snr_db_grid):
            raise ValueError("sweep grid is empty")

    def constellation_symbols(self) -> tuple[np.ndarray, int]:
        return qam_constellation(self.constellation)

    def bits_per_symbol(self) -> int:
        return self.constellation_symbols()[1]

    def noise_density(self, snr_db: float) -> float:
        """N0 for a target Eb/N0 in dB, with Eb = es / bits-per-symbol."""
        eb = self.es / self.bits_per_symbol()
        return eb / (10.0 ** (snr_db / 10.0))

    def sweep_points(self) -> list[tuple[float, int]]:
        """(snr_db, n_users) per sweep point in evaluation order."""
        if self.user_grid is not None:
            return [(snr, k) for snr in self.fixed_snr_db for k in self.user_grid]
        return [(snr, self.n_users) for snr in self.snr_db_grid]


@dataclass(frozen=True)
class ChannelSet:
    """Per-user MIMO channels as one order-3 tensor (n_rx, K, n_tx)."""

    h: DenseTensor


@dataclass(frozen=True)
class SpreadingSet:
    """Spreading sequences, both as the stacked (K*n_tx, L) matrix (row
    j = (k-1)*n_tx + i) and as the order-5 selection tensor whose only
    non-zero entries sit at matching (k, i) pairs."""

    s_matrix: np.ndarray
    s_tensor: DenseTensor


@dataclass(frozen=True)
class CdmaResult:
    """Per sweep point and receiver: error rates plus the Monte-Carlo budget
    actually spent."""

    experiment: str
    snr_db: float
    n_users: int
    receiver: str
    ber: float
    nmse: float
    bits_sent: int
    bit_errors: int
    realizations: int
    frames: int
    nmse_se: float
    capped: bool
    seed: int


# -- generation and the system model -----------------------------------------


def gen_channel(cfg: CdmaConfig, rng: np.random.Generator) -> ChannelSet:
    """i.i.d. CN(0, 1/n_rx) channel entries for every user and antenna pair."""
    h = complex_normal(rng, (cfg.n_rx, cfg.n_users, cfg.n_tx), 1.0 / cfg.n_rx)
    return ChannelSet(h=DenseTensor(h))


_QUAD = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)


def _spreading_rows(cfg: CdmaConfig, rng: np.random.Generator) -> np.ndarray:
    quads = rng.integers(0, 4, size=(cfg.n_users * cfg.n_tx, cfg.spreading_length))
    return _QUAD[quads] / math.sqrt(cfg.spreading_length)


def gen_spreading(cfg: CdmaConfig, rng: np.random.Generator) -> SpreadingSet:
    """Quaternary spreading sequences, equiprobable over
    {+1, +j, -1, -j} / sqrt(L), one per (user, antenna) stream."""
    k, nt = cfg.n_users, cfg.n_tx
    s_matrix = _spreading_rows(cfg, rng)
    s5 = np.zeros((k, nt, cfg.spreading_length, k, nt), dtype=np.complex128)
    kk = np.arange(k)[:, None]
    ii = np.arange(nt)[None, :]
    s5[kk, ii, :, kk, ii] = s_matrix.reshape(k, nt, cfg.spreading_length)
    return SpreadingSet(s_matrix=s_matrix, s_tensor=DenseTensor(s5))


def equivalent_channel(channel: ChannelSet, spreading: SpreadingSet) -> DenseTensor:
    """Order-4 equivalent channel (n_rx, L, K, n_tx): the order-3 channel
    contracted with the spreading tensor over the (user, antenna) modes."""
    return einstein_product(channel.h, spreading.s_tensor, 2)


def transmit(
    hbar: DenseTensor, x: DenseTensor, n0: float, rng: np.random.Generator
) -> DenseTensor:
    """Received (n_rx, L) tensor: the equivalent channel applied to the
    (K, n_tx) symbol matrix plus CN(0, n0) noise per entry."""
    if hbar.order != 4:
        raise ValueError("equivalent channel must be order 4")
    if x.shape != hbar.shape[2:]:
        raise ValueError(f"symbol matrix shape {x.shape} does not match channel {hbar.shape[2:]}")
    if n0 < 0:
        raise ValueError("n0 must be non-negative")
    y = einstein_product(hbar, x, 2)
    if n0 > 0:
        y = y + DenseTensor(complex_normal(rng, y.shape, n0))
    return y


# -- receivers ----------------------------------------------------------------


def _solve_checked(gram: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    s = np.linalg.svd(gram, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= s[0] * max(gram.shape) * _EPS:
        raise SingularTensorError(f"{what} is singular to working precision")
    return np.linalg.solve(gram, rhs)


def _mmse_left(m: np.ndarray, lam: float, what: str) -> np.ndarray:
    """(m^H m + lam I)^-1 m^H, the left LMMSE/ZF equalizer for m."""
    gram = m.conj().T @ m
    if lam:
        gram = gram + lam * np.eye(gram.shape[0])
    return _solve_checked(gram, m.conj().T, what)


def receiver_matrix_a(h_stacked: np.ndarray, n0_over_es: float, variant: str) -> np.ndarray:
    """Spatial stage A: "zf" ignores noise, "lmmse" regularizes the channel
    Gram matrix by N0/Es."""
    if variant == "zf":
        return _mmse_left(h_stacked, 0.0, "channel normal matrix")
    if variant == "lmmse":
        return _mmse_left(h_stacked, n0_over_es, "regularized channel normal matrix")
    raise ValueError(f"unknown A variant {variant!r}")


def receiver_matrix_b(s_matrix: np.ndarray, n0_over_es: float, variant: str) -> np.ndarray:
    """Code stage B: "decor" is the multi-user decorrelator S^H (S S^H)^-1,
    "lmmse" its noise-regularized counterpart."""
    gram = s_matrix @ s_matrix.conj().T
    if variant == "decor":
        lam = 0.0
    elif variant == "lmmse":
        lam = n0_over_es
    else:
        raise ValueError(f"unknown B variant {variant!r}")
    if lam:
        gram = gram + lam * np.eye(gram.shape[0])
    return _solve_checked(gram, s_matrix, "spreading normal matrix").conj().T


def receiver_matrices(
    h_stacked: np.ndarray, s_matrix: np.ndarray, n0_over_es: float, variant: str
) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) for the named two-stage receiver: LMMSE1 = LMMSE/DECOR,
    LMMSE2 = LMMSE/LMMSE."""
    if variant == "LMMSE1":
        return (
            receiver_matrix_a(h_stacked, n0_over_es, "lmmse"),
            receiver_matrix_b(s_matrix, n0_over_es, "decor"),
        )
    if variant == "LMMSE2":
        return (
            receiver_matrix_a(h_stacked, n0_over_es, "lmmse"),
            receiver_matrix_b(s_matrix, n0_over_es, "lmmse"),
        )
    raise ValueError(f"unknown receiver variant {variant!r}")


def nearest_symbol_indices(values: np.ndarray, constellation: np.ndarray) -> np.ndarray:
    """Index of the nearest constellation point per value; ties resolve to the
    lowest index."""
    d = np.abs(values[..., None] - constellation) ** 2
    return np.argmin(d, axis=-1)


def decode_two_stage(
    a: np.ndarray,
    y: DenseTensor,
    b: np.ndarray,
    constellation: np.ndarray,
    n_tx: int,
) -> DenseTensor:
    """Hard decisions of a two-stage receiver.

    The diagonal of A Y B estimates the stacked symbols at j = (k-1)*n_tx + i;
    each entry is mapped to the nearest constellation point and returned as a
    (K, n_tx) matrix.
    """
    est = np.einsum("jr,rl,lj->j", a, y.numpy(), b)
    idx = nearest_symbol_indices(est, constellation)
    k = est.size // n_tx
    return DenseTensor(constellation[idx].reshape(k, n_tx))


def tml_mmse(hbar: DenseTensor, n0_over_es: float) -> DenseTensor:
    """Joint MMSE receiver tensor (K, n_tx, n_rx, L):

        R = hermitian(hbar) *_2 inverse(hbar *_2 hermitian(hbar) + (N0/Es) I)

    with the identity tensor over the (n_rx, L) output modes.  For
    ``n0_over_es = 0`` the regularized operator must itself be invertible.
    """
    if hbar.order != 4:
        raise ValueError("equivalent channel must be order 4")
    if n0_over_es < 0:
        raise ValueError("n0_over_es must be non-negative")
    hh = hermitian(hbar, 2)
    gram = einstein_product(hbar, hh, 2)
    reg = gram + n0_over_es * identity_tensor(hbar.shape[:2])
    return einstein_product(hh, inverse(reg), 2)


# -- Monte-Carlo loop ----------------------------------------------------------


_POPCOUNT = np.array([bin(v).count("1") for v in range(1 << 8)], dtype=np.int64)


@dataclass
class _ReceiverAccum:
    errors: int = 0
    sumsq: float = 0.0
    sumsq2: float = 0.0


@dataclass
class _RealizationStats:
    bits: int
    frames: int
    per_receiver: dict = field(default_factory=dict)


def _simulate_realization(
    cfg: CdmaConfig, snr_db: float, point: int, realization: int
) -> _RealizationStats:
    """One channel drop: generate channel, spreading, receivers, then run all
    frames of the realization through the three receivers."""
    k, nt, nr, l = cfg.n_users, cfg.n_tx, cfg.n_rx, cfg.spreading_length
    n0 = cfg.noise_density(snr_db)
    lam = n0 / cfg.es
    const, bps = cfg.constellation_symbols()
    const_scaled = const * math.sqrt(cfg.es)

    channel = gen_channel(cfg, _stream(cfg.master_seed, point, realization, _ROLE_CHANNEL))
    h3 = channel.h.numpy()
    s_rows = _spreading_rows(cfg, _stream(cfg.master_seed, point, realization, _ROLE_SPREADING))

    # Equivalent channel in unfolded form; column order matches the
    # first-mode-fastest vectorization of the (K, n_tx) symbol matrix.
    st = s_rows.reshape(k, nt, l)
    hbar_mat = np.einsum("rki,kil->rlki", h3, st).reshape(nr * l, k * nt, order="F")

    h_stacked = h3.reshape(nr, k * nt)
    a_lmmse = receiver_matrix_a(h_stacked, lam, "lmmse")
    b_decor = receiver_matrix_b(s_rows, lam, "decor")
    b_lmmse = receiver_matrix_b(s_rows, lam, "lmmse")
    # Joint receiver through the K*n_tx Gram; algebraically identical to the
    # order-4 tensor formula and property-tested against it.
    r_mat = _mmse_left(hbar_mat, lam, "regularized equivalent-channel operator")

    f = cfg.frames_per_realization
    rng_sym = _stream(cfg.master_seed, point, realization, _ROLE_SYMBOLS)
    rng_noise = _stream(cfg.master_seed, point, realization, _ROLE_NOISE)
    tx_idx = rng_sym.integers(0, const.size, size=(k, nt, f))
    x = const_scaled[tx_idx]
    x_vec = x.reshape(k * nt, f, order="F")
    y_vec = hbar_mat @ x_vec + complex_normal(rng_noise, (nr * l, f), n0)

    est_tml = (r_mat @ y_vec).reshape(k, nt, f, order="F")
    y3 = y_vec.reshape(nr, l, f, order="F")
    ay = np.einsum("jr,rlf->jlf", a_lmmse, y3)
    est_lm1 = np.einsum("jlf,lj->jf", ay, b_decor).reshape(k, nt, f)
    est_lm2 = np.einsum("jlf,lj->jf", ay, b_lmmse).reshape(k, nt, f)

    stats = _RealizationStats(bits=k * nt * bps * f, frames=f)
    for name, est in (("LMMSE1", est_lm1), ("LMMSE2", est_lm2), ("TML_MMSE", est_tml)):
        det_idx = nearest_symbol_indices(est, const_scaled)
        errors = int(_POPCOUNT[det_idx ^ tx_idx].sum())
        per_frame = np.sum(np.abs(est - x) ** 2, axis=(0, 1)) / (k * nt)
        stats.per_receiver[name] = (
            errors,
            float(per_frame.sum()),
            float(np.sum(per_frame * per_frame)),
        )
    return stats


def run_monte_carlo(cfg: CdmaConfig, experiment: str | None = None) -> list[CdmaResult]:
    """Run every sweep point of the configuration.

    Per point, whole realizations are simulated in batches (each realization
    is an independent, individually-seeded work unit) until both stop rules
    hold: at least ``n_channel_realizations`` channels, and at least
    ``min_bit_errors`` bit errors for every receiver -- or the per-point bit
    cap is reached, which is then recorded on the results.  Results are
    reduced in realization order, so thread count does not affect output.
    """
    if experiment is None:
        experiment = "ber_vs_users" if cfg.user_grid is not None else "ber_vs_snr"
    threads = cfg.n_threads or os.cpu_count() or 1
    results: list[CdmaResult] = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for point, (snr_db, k_users) in enumerate(cfg.sweep_points()):
            pcfg = replace(cfg, n_users=k_users)
            accum = {name: _ReceiverAccum() for name in RECEIVERS}
            bits_total = 0
            frames_total = 0
            done = 0
            while True:
                batch = range(done, done + pcfg.n_channel_realizations)
                batch_stats = list(
                    pool.map(lambda r: _simulate_realization(pcfg, snr_db, point, r), batch)
                )
                for st in batch_stats:
                    bits_total += st.bits
                    frames_total += st.frames
                    for name in RECEIVERS:
                        errors, sumsq, sumsq2 = st.per_receiver[name]
                        acc = accum[name]
                        acc.errors += errors
                        acc.sumsq += sumsq
                        acc.sumsq2 += sumsq2
                done += len(batch)
                errors_met = all(accum[n].errors >= pcfg.min_bit_errors for n in RECEIVERS)
                if done >= pcfg.n_channel_realizations and (
                    errors_met or bits_total >= pcfg.max_bits_per_point
                ):
                    break
            capped = not errors_met
            for name in RECEIVERS:
                acc = accum[name]
                mean = acc.sumsq / frames_total
                if frames_total > 1:
                    var = max(acc.sumsq2 / frames_total - mean * mean, 0.0)
                    se = math.sqrt(var / (frames_total - 1))
                else:
                    se = 0.0
                results.append(
                    CdmaResult(
                        experiment=experiment,
                        snr_db=snr_db,
                        n_users=k_users,
                        receiver=name,
                        ber=acc.errors / bits_total,
                        nmse=mean,
                        bits_sent=bits_total,
                        bit_errors=acc.errors,
                        realizations=done,
                        frames=frames_total,
                        nmse_se=se,
                        capped=capped,
                        seed=cfg.master_seed,
                    )
                )
    return results
