"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  The Monte-Carlo criteria use a reduced budget (>= 20 channel
realizations, >= 100 bit errors per receiver or the per-point bit cap) with a
frozen master seed, so they are deterministic and complete in well under five
minutes.
"""

import json
import math
import time

import numpy as np
import pytest

import einsys as es
from einsys.cdma import _POPCOUNT, _stream, nearest_symbol_indices
from einsys.cli import main as cli_main
from helpers import (
    loop_contracted_product,
    loop_einstein_product,
    random_shape,
    random_tensor,
    rel_err,
)

MC_SEED = 2026


def _report(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def _rng(tag: int) -> np.random.Generator:
    return np.random.default_rng((20260810, tag))


@pytest.fixture(scope="module")
def experiment1():
    cfg = es.experiment1_config(
        n_channel_realizations=20,
        min_bit_errors=100,
        frames_per_realization=150,
        max_bits_per_point=1_500_000,
        master_seed=MC_SEED,
    )
    t0 = time.perf_counter()
    results = es.run_ber_vs_snr(cfg)
    wall = time.perf_counter() - t0
    return cfg, results, wall


@pytest.fixture(scope="module")
def experiment2():
    cfg = es.experiment2_config(
        n_channel_realizations=20,
        min_bit_errors=100,
        frames_per_realization=150,
        max_bits_per_point=1_000_000,
        master_seed=MC_SEED,
    )
    t0 = time.perf_counter()
    results = es.run_ber_vs_users(cfg)
    wall = time.perf_counter() - t0
    return cfg, results, wall


def _by(results, receiver, **keys):
    rows = [
        r
        for r in results
        if r.receiver == receiver and all(getattr(r, k) == v for k, v in keys.items())
    ]
    assert len(rows) == 1
    return rows[0]


def _ber_se(r) -> float:
    return math.sqrt(max(r.ber * (1 - r.ber), 1e-300) / r.bits_sent)


def test_criterion_01_contraction_oracle_equivalence():
    rng = _rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for case in range(200):
        n = int(rng.integers(0, 3))
        free_a = int(rng.integers(0, 5 - n))
        free_b = int(rng.integers(0, 5 - n - free_a + 1))
        mid = tuple(int(d) for d in rng.integers(1, 5, size=n))
        sa = tuple(int(d) for d in rng.integers(1, 5, size=free_a)) + mid
        sb = mid + tuple(int(d) for d in rng.integers(1, 5, size=free_b))
        a = random_tensor(rng, sa)
        b = random_tensor(rng, sb)
        if case % 2 == 0:
            got = es.einstein_product(a, b, n)
            want = loop_einstein_product(a, b, n)
        else:
            # shuffle the contracted positions into a non-consecutive pairing
            perm = rng.permutation(n)
            modes_a = [free_a + 1 + int(p) for p in perm]
            modes_b = [1 + int(p) for p in perm]
            got = es.contracted_product(a, b, (modes_a, modes_b))
            want = loop_contracted_product(a, b, modes_a, modes_b)
        scale = float(np.abs(want.numpy()).max(initial=0.0))
        err = float(np.abs(got.numpy() - want.numpy()).max(initial=0.0))
        assert err <= 1e-12 * max(scale, 1e-300)
        worst = max(worst, err / max(scale, 1e-300))
    elapsed = time.perf_counter() - t0
    _report(
        "criterion 1: 200 contractions vs nested-loop oracle",
        elapsed < 10.0,
        f"max rel err {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_02_lemma1_homomorphism():
    rng = _rng(2)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        p = int(rng.integers(1, 3))
        mid = random_shape(rng, m)
        a = random_tensor(rng, random_shape(rng, n) + mid)
        b = random_tensor(rng, mid + random_shape(rng, p))
        lhs = es.unfold(es.einstein_product(a, b, m), n)
        rhs = es.DenseTensor(es.unfold(a, n).numpy() @ es.unfold(b, m).numpy())
        worst = max(worst, rel_err(lhs, rhs))
    _report(
        "criterion 2: unfolding homomorphism on 200 pairs",
        worst <= 1e-12,
        f"max rel err {worst:.2e}",
    )


def test_criterion_03_decomposition_reconstructions():
    rng = _rng(3)
    worst_svd = worst_evd = worst_lu = worst_mp = worst_imag = 0.0
    for i in range(100):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        row = random_shape(rng, n)
        col = random_shape(rng, m)

        a = random_tensor(rng, row + col)
        f = es.svd(a, n)
        back = es.einstein_product(es.einstein_product(f.u, f.d, n), es.hermitian(f.v, m), m)
        worst_svd = max(worst_svd, (back - a).norm() / a.norm())

        b = random_tensor(rng, row + row)
        herm = es.einstein_product(es.hermitian(b, n), b, n)
        e = es.evd_hermitian(herm)
        back = es.einstein_product(es.einstein_product(e.u, e.d, n), es.hermitian(e.u, n), n)
        worst_evd = max(worst_evd, (back - herm).norm() / herm.norm())
        w = np.linalg.eigvals(es.unfold(herm, n).numpy())
        worst_imag = max(
            worst_imag, float(np.abs(w.imag).max()) / max(1.0, float(np.abs(w).max()))
        )

        size = es.unfold(b, n).shape[0]
        dd = es.fold(
            es.DenseTensor(es.unfold(b, n).numpy() + 4.0 * size * np.eye(size)), row, row
        )
        flu = es.lu(dd)
        back = es.einstein_product(flu.l, flu.u, n)
        worst_lu = max(worst_lu, (back - dd).norm() / dd.norm())

        if i % 3 == 0:  # rank-deficient pseudo-inverse input
            a = es.outer_product(random_tensor(rng, row), random_tensor(rng, col))
        pinv = es.moore_penrose(a, n)
        scale = max(a.norm(), pinv.norm())
        ap = es.einstein_product(a, pinv, m)
        pa = es.einstein_product(pinv, a, n)
        conds = [
            (es.einstein_product(ap, a, n) - a).norm(),
            (es.einstein_product(pa, pinv, m) - pinv).norm(),
            (es.hermitian(ap, n) - ap).norm(),
            (es.hermitian(pa, m) - pa).norm(),
        ]
        worst_mp = max(worst_mp, max(conds) / scale)

    ok = (
        worst_svd <= 1e-10
        and worst_evd <= 1e-10
        and worst_lu <= 1e-10
        and worst_mp <= 1e-10
        and worst_imag <= 1e-12
    )
    _report(
        "criterion 3: decomposition reconstructions (100 each)",
        ok,
        f"svd {worst_svd:.1e}, evd {worst_evd:.1e}, lu {worst_lu:.1e},"
        f" penrose {worst_mp:.1e}, eig imag {worst_imag:.1e}",
    )


def test_criterion_04_identity_suite():
    rng = _rng(4)
    worst = {}

    def track(key, value):
        worst[key] = max(worst.get(key, 0.0), value)

    for _ in range(50):
        # associativity / distributivity / hermitian & inverse reversal
        a = random_tensor(rng, (2, 3, 2))
        b = random_tensor(rng, (3, 2, 4))
        c = random_tensor(rng, (4, 2, 2))
        lhs = es.einstein_product(es.einstein_product(a, b, 2), c, 1)
        rhs = es.einstein_product(a, es.einstein_product(b, c, 1), 2)
        track("assoc", rel_err(lhs, rhs))

        a2 = random_tensor(rng, (2, 2, 3, 2))
        b2 = random_tensor(rng, (3, 2))
        track(
            "commut",
            rel_err(
                es.einstein_product(a2, b2, 2),
                es.einstein_product(b2, es.transpose(a2, 2), 2),
            ),
        )

        d = random_tensor(rng, (2, 3, 2))
        track(
            "distrib",
            rel_err(
                es.einstein_product(a + d, b, 2),
                es.einstein_product(a, b, 2) + es.einstein_product(d, b, 2),
            ),
        )

        x = random_tensor(rng, (2, 2, 3, 2))
        y = random_tensor(rng, (3, 2, 4))
        track(
            "herm-rev",
            rel_err(
                es.hermitian(es.einstein_product(x, y, 2), (2, 1)),
                es.einstein_product(es.hermitian(y, (2, 1)), es.hermitian(x, (2, 2)), 2),
            ),
        )

        sq_a = random_tensor(rng, (2, 2, 2, 2))
        sq_b = random_tensor(rng, (2, 2, 2, 2))
        size_a = es.unfold(sq_a, 2).numpy() + 8 * np.eye(4)
        size_b = es.unfold(sq_b, 2).numpy() + 8 * np.eye(4)
        sq_a = es.fold(es.DenseTensor(size_a), (2, 2), (2, 2))
        sq_b = es.fold(es.DenseTensor(size_b), (2, 2), (2, 2))
        track(
            "inv-rev",
            rel_err(
                es.inverse(es.einstein_product(sq_a, sq_b, 2)),
                es.einstein_product(es.inverse(sq_b), es.inverse(sq_a), 2),
            ),
        )

        # transpose invariance of the inner product
        t1 = random_tensor(rng, (2, 3, 2))
        t2 = random_tensor(rng, (2, 3, 2))
        sigma = list(rng.permutation(3) + 1)
        ip1 = es.inner_product(t1, t2)
        ip2 = es.inner_product(es.permute(t1, sigma), es.permute(t2, sigma))
        track("transpose-ip", abs(ip1 - ip2) / max(abs(ip1), 1e-300))

        # trace / determinant identities
        u = random_tensor(rng, (2, 3))
        v = random_tensor(rng, (2, 3))
        track(
            "trace-outer",
            abs(es.trace(es.outer_product(u, v)) - es.inner_product(u, v))
            / max(abs(es.inner_product(u, v)), 1e-300),
        )
        p = random_tensor(rng, (2, 2, 3))
        q = random_tensor(rng, (3, 2, 2))
        tr1 = es.trace(es.einstein_product(p, q, 1))
        tr2 = es.trace(es.einstein_product(q, p, 2))
        track("trace-cyclic", abs(tr1 - tr2) / max(abs(tr1), 1e-300))
        d1 = es.determinant(es.identity_tensor((2, 2)) + es.einstein_product(p, q, 1))
        d2 = es.determinant(es.identity_tensor((3,)) + es.einstein_product(q, p, 2))
        track("sylvester", abs(d1 - d2) / max(abs(d1), 1e-300))
        dp = es.determinant(es.einstein_product(sq_a, sq_b, 2))
        track(
            "det-mult",
            abs(dp - es.determinant(sq_a) * es.determinant(sq_b)) / max(abs(dp), 1e-300),
        )

        # singular values vs eigenvalues of the gram tensor
        g = random_tensor(rng, (2, 3, 2, 2))
        sv = es.svd(g, 2).singular_values
        lam = np.clip(
            es.evd_hermitian(es.einstein_product(es.hermitian(g, 2), g, 2)).eigenvalues,
            0.0,
            None,
        )
        track(
            "sv-eig",
            float(np.abs(np.sqrt(lam)[: sv.size] - sv).max()) / max(float(sv.max()), 1e-300),
        )

    bad = {k: v for k, v in worst.items() if v > 1e-10}
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items()))
    _report("criterion 4: algebra/trace/determinant identity suite (50 each)", not bad, detail)


def test_criterion_05_convolution_theorem():
    rng = _rng(5)
    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        in_shape = random_shape(rng, n)
        out_shape = random_shape(rng, m)
        h = es.SystemTensor(
            es.TensorSequence(
                int(rng.integers(-2, 2)),
                [random_tensor(rng, out_shape + in_shape) for _ in range(int(rng.integers(1, 4)))],
            ),
            input_order=n,
        )
        x = es.TensorSequence(
            int(rng.integers(-2, 2)),
            [random_tensor(rng, in_shape) for _ in range(int(rng.integers(1, 4)))],
        )
        y = es.contracted_convolve(h, x)
        for q in range(8):
            z = np.exp(2j * np.pi * (q + 0.618) / 8)
            lhs = es.z_transform_eval(y, z)
            rhs = es.einstein_product(
                es.z_transform_eval(h.impulse_response, z), es.z_transform_eval(x, z), n
            )
            worst = max(worst, (lhs - rhs).norm() / max(rhs.norm(), 1e-300))
    _report(
        "criterion 5: convolution theorem at 8 unit-circle points",
        worst <= 1e-10,
        f"max rel err {worst:.2e}",
    )


def test_criterion_06_bibo_gain_bound():
    rng = _rng(6)
    violations = 0
    for _ in range(50):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        in_shape = random_shape(rng, n)
        out_shape = random_shape(rng, m)
        h = es.SystemTensor(
            es.TensorSequence(
                int(rng.integers(-1, 2)),
                [random_tensor(rng, out_shape + in_shape) for _ in range(int(rng.integers(1, 4)))],
            ),
            input_order=n,
        )
        stat = es.bibo_statistic_discrete(h)
        for _ in range(100):
            frames = [random_tensor(rng, in_shape) for _ in range(int(rng.integers(1, 4)))]
            x = es.TensorSequence(int(rng.integers(-1, 2)), frames)
            peak = es.sup_norm(x)
            x = es.TensorSequence(x.k_min, [f / peak for f in frames])
            y = es.contracted_convolve(h, x)
            if es.sup_norm(y) > stat * es.sup_norm(x) * (1 + 1e-12):
                violations += 1
    _report(
        "criterion 6: BIBO gain bound on 50 systems x 100 inputs",
        violations == 0,
        f"{violations} violations",
    )


def test_criterion_07_cdma_snr_sweep(experiment1):
    cfg, results, wall = experiment1
    ordering_ok = True
    details = []
    for snr in cfg.snr_db_grid:
        tml = _by(results, "TML_MMSE", snr_db=snr)
        lm2 = _by(results, "LMMSE2", snr_db=snr)
        lm1 = _by(results, "LMMSE1", snr_db=snr)
        if tml.ber > lm2.ber + 2 * math.hypot(_ber_se(tml), _ber_se(lm2)):
            ordering_ok = False
            details.append(f"ber TML>LMMSE2 @{snr}")
        if lm2.ber > lm1.ber + 2 * math.hypot(_ber_se(lm2), _ber_se(lm1)):
            ordering_ok = False
            details.append(f"ber LMMSE2>LMMSE1 @{snr}")
        if tml.nmse > lm2.nmse + 2 * math.hypot(tml.nmse_se, lm2.nmse_se):
            ordering_ok = False
            details.append(f"nmse TML>LMMSE2 @{snr}")
    tml_ber = [_by(results, "TML_MMSE", snr_db=s).ber for s in cfg.snr_db_grid]
    tml_nmse = [_by(results, "TML_MMSE", snr_db=s).nmse for s in cfg.snr_db_grid]
    decreasing = all(b2 < b1 for b1, b2 in zip(tml_ber, tml_ber[1:])) and all(
        n2 < n1 for n1, n2 in zip(tml_nmse, tml_nmse[1:])
    )
    # NMSE monotone non-increasing in SNR for every receiver (within 2 SE)
    for name in es.RECEIVERS:
        rows = [_by(results, name, snr_db=s) for s in cfg.snr_db_grid]
        for lo, hi in zip(rows, rows[1:]):
            if hi.nmse > lo.nmse + 2 * math.hypot(hi.nmse_se, lo.nmse_se):
                ordering_ok = False
                details.append(f"nmse rises for {name} {lo.snr_db}->{hi.snr_db}")
    budget_ok = all(r.realizations >= 20 for r in results) and all(
        r.bit_errors >= 100 or r.capped for r in results
    )
    ok = ordering_ok and decreasing and budget_ok and wall < 300.0
    _report(
        "criterion 7: SNR sweep (L=32, K=4, n_tx=4, n_rx=32)",
        ok,
        f"wall {wall:.0f}s, TML ber {tml_ber[0]:.2e}->{tml_ber[-1]:.2e}"
        + ("; " + "; ".join(details) if details else ""),
    )


def test_criterion_08_cdma_user_sweep(experiment2):
    cfg, results, wall = experiment2
    ok = wall < 300.0
    details = []
    for snr in cfg.fixed_snr_db:
        tml_lo = _by(results, "TML_MMSE", snr_db=snr, n_users=2).ber
        tml_hi = _by(results, "TML_MMSE", snr_db=snr, n_users=8).ber
        lm1_lo = _by(results, "LMMSE1", snr_db=snr, n_users=2).ber
        lm1_hi = _by(results, "LMMSE1", snr_db=snr, n_users=8).ber
        ratio_tml = tml_hi / tml_lo
        ratio_lm1 = lm1_hi / lm1_lo
        details.append(f"@{snr}dB TML x{ratio_tml:.2f}, LMMSE1 x{ratio_lm1:.2f}")
        if not (ratio_tml < 3.0 and ratio_lm1 > ratio_tml):
            ok = False
    _report(
        "criterion 8: user sweep robustness (L=64, n_rx=64, n_tx=2)",
        ok,
        f"wall {wall:.0f}s, " + "; ".join(details),
    )


def test_criterion_09_single_user_qpsk_sanity():
    cfg = es.CdmaConfig(
        spreading_length=8,
        n_users=1,
        n_tx=1,
        n_rx=1,
        snr_db_grid=(4.0, 6.0, 8.0),
        master_seed=77,
        min_bit_errors=1,
        n_channel_realizations=1,
    )
    const, _ = es.qam_constellation("qam4")
    unit_channel = es.ChannelSet(h=es.DenseTensor(np.ones((1, 1, 1))))
    frames_per_rep = 100_000
    reps_by_snr = {4.0: 2, 6.0: 6, 8.0: 16}
    details = []
    ok = True
    for point, snr in enumerate(cfg.snr_db_grid):
        n0 = cfg.noise_density(snr)
        target = 0.5 * math.erfc(math.sqrt(10 ** (snr / 10)))
        errors = 0
        bits = 0
        for rep in range(reps_by_snr[snr]):
            sp = es.gen_spreading(cfg, _stream(cfg.master_seed, point, rep, 1))
            hbar = es.equivalent_channel(unit_channel, sp)
            r_vec = es.unfold(es.tml_mmse(hbar, n0 / cfg.es), 2).numpy()
            hb_vec = es.unfold(hbar, 2).numpy()
            idx = _stream(cfg.master_seed, point, rep, 2).integers(0, 4, frames_per_rep)
            y = hb_vec @ const[idx][None, :] + es.complex_normal(
                _stream(cfg.master_seed, point, rep, 3), (8, frames_per_rep), n0
            )
            det = nearest_symbol_indices((r_vec @ y)[0], const)
            errors += int(_POPCOUNT[det ^ idx].sum())
            bits += 2 * frames_per_rep
        ber = errors / bits
        rel = abs(ber - target) / target
        details.append(f"@{snr}dB {ber:.3e} vs {target:.3e} ({rel:.1%})")
        if rel > 0.15:
            ok = False
    _report("criterion 9: single-user BER vs closed-form QPSK curve", ok, "; ".join(details))


def test_criterion_10_cli_determinism(tmp_path):
    snr_cfg = {
        "spreading_length": 8,
        "n_users": 2,
        "n_tx": 2,
        "n_rx": 8,
        "snr_db_grid": [0.0, 6.0],
        "n_channel_realizations": 3,
        "frames_per_realization": 15,
        "min_bit_errors": 10,
        "max_bits_per_point": 20_000,
    }
    users_cfg = {
        **{k: v for k, v in snr_cfg.items() if k != "snr_db_grid"},
        "n_tx": 1,
        "user_grid": [2, 4],
        "fixed_snr_db": [5.0, 8.0],
    }
    tn_spec = {
        "nodes": [{"name": "A", "shape": [2, 3]}, {"name": "B", "shape": [3, 2]}],
        "edges": [{"a": "A", "mode_a": 2, "b": "B", "mode_b": 1}],
    }
    ok = True
    details = []
    for name, command, config in (
        ("ber-vs-snr", "ber-vs-snr", snr_cfg),
        ("ber-vs-users", "ber-vs-users", users_cfg),
        ("export-tn", "export-tn", tn_spec),
    ):
        cfg_path = tmp_path / f"{name}.json"
        cfg_path.write_text(json.dumps(config))
        outputs = []
        runs = (
            [("1", "a"), ("1", "b"), ("4", "a"), ("4", "b")]
            if command != "export-tn"
            else [(None, "a"), (None, "b")]
        )
        for threads, tag in runs:
            out = tmp_path / f"{name}-{threads}-{tag}.out"
            argv = [command, "--config", str(cfg_path), "--out", str(out)]
            if threads is not None:
                argv += ["--seed", "13", "--threads", threads]
            assert cli_main(argv) == 0
            outputs.append(out.read_bytes())
        if not all(o == outputs[0] for o in outputs):
            ok = False
            details.append(f"{name} differs")
    if not details:
        details.append("all commands byte-identical across reruns and thread counts")
    _report("criterion 10: CLI determinism", ok, "; ".join(details))
