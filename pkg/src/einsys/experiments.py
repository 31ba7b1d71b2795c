"""Canned receiver-comparison experiments and their CSV rendering.

Two protocols are provided:

* ``ber_vs_snr`` -- sweep Eb/N0 over a dB grid at fixed load
  (defaults L=32, K=4, n_tx=4, n_rx=32);
* ``ber_vs_users`` -- sweep the number of users at two fixed Eb/N0 values
  (defaults L=64, n_rx=64, n_tx=2, K in {2,4,6,8} at 5 and 8 dB).

CSV output is plain RFC-style text: one header row, comma separators, '.'
decimals via ``repr`` (locale independent), LF line endings.  Identical
configurations produce byte-identical files regardless of thread count.
"""

from __future__ import annotations

import dataclasses

from .cdma import CdmaConfig, CdmaResult, run_monte_carlo

__all__ = [
    "ConfigError",
    "experiment1_config",
    "experiment2_config",
    "config_from_dict",
    "run_ber_vs_snr",
    "run_ber_vs_users",
    "results_to_csv",
]

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(CdmaConfig)}


class ConfigError(ValueError):
    """The experiment configuration is malformed or inconsistent."""


def experiment1_config(**overrides) -> CdmaConfig:
    """SNR-sweep defaults: L=32, K=4, n_tx=4, n_rx=32, 0..12 dB."""
    base = dict(
        spreading_length=32,
        n_users=4,
        n_tx=4,
        n_rx=32,
        snr_db_grid=(0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0),
        user_grid=None,
    )
    base.update(overrides)
    return _build(base)


def experiment2_config(**overrides) -> CdmaConfig:
    """User-sweep defaults: L=64, n_rx=64, n_tx=2, K in {2,4,6,8} at 5 and 8 dB."""
    base = dict(
        spreading_length=64,
        n_users=8,
        n_tx=2,
        n_rx=64,
        user_grid=(2, 4, 6, 8),
        fixed_snr_db=(5.0, 8.0),
    )
    base.update(overrides)
    return _build(base)


def _build(params: dict) -> CdmaConfig:
    unknown = set(params) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return CdmaConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(d: dict, experiment: str) -> CdmaConfig:
    """Resolve a partial key/value configuration onto the defaults of the
    named experiment ("ber_vs_snr" or "ber_vs_users")."""
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a key/value mapping")
    overrides = {k: v for k, v in d.items() if v is not None}
    if "snr_db_grid" in overrides:
        overrides["snr_db_grid"] = tuple(overrides["snr_db_grid"])
    if "user_grid" in overrides:
        overrides["user_grid"] = tuple(overrides["user_grid"])
    if "fixed_snr_db" in overrides:
        overrides["fixed_snr_db"] = tuple(overrides["fixed_snr_db"])
    if experiment == "ber_vs_snr":
        overrides.setdefault("user_grid", None)
        return experiment1_config(**overrides)
    if experiment == "ber_vs_users":
        return experiment2_config(**overrides)
    raise ConfigError(f"unknown experiment {experiment!r}")


def run_ber_vs_snr(cfg: CdmaConfig) -> list[CdmaResult]:
    if cfg.user_grid is not None:
        raise ConfigError("ber_vs_snr does not take a user grid")
    return run_monte_carlo(cfg, experiment="ber_vs_snr")


def run_ber_vs_users(cfg: CdmaConfig) -> list[CdmaResult]:
    if cfg.user_grid is None:
        raise ConfigError("ber_vs_users requires a user grid")
    return run_monte_carlo(cfg, experiment="ber_vs_users")


def results_to_csv(results: list[CdmaResult], include_users: bool) -> str:
    """Render result rows; the user-sweep schema adds the k column."""
    header = ["experiment", "snr_db", "receiver", "ber", "nmse", "bits", "errors", "realizations", "seed"]
    if include_users:
        header.insert(2, "k")
    lines = [",".join(header)]
    for r in results:
        row = [
            r.experiment,
            repr(r.snr_db),
            r.receiver,
            repr(r.ber),
            repr(r.nmse),
            str(r.bits_sent),
            str(r.bit_errors),
            str(r.realizations),
            str(r.seed),
        ]
        if include_users:
            row.insert(2, str(r.n_users))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
