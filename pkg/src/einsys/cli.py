"""Command-line front end.

The CLI is a thin client of the HTTP service: every command serializes its
inputs, posts them to an endpoint, and writes the response payload out.  By
default the service application is mounted in-process (no server needed);
``--url`` points the same commands at a remote instance.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 numerical
failure.  ``EINSYS_SEED``, ``EINSYS_THREADS``, ``EINSYS_MAX_BITS`` and
``EINSYS_URL`` override defaults when the corresponding flag is absent.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_ENV_PREFIX = "EINSYS_"


class _UsageError(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage is 1 here
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


class _ConfigFailure(Exception):
    pass


class _NumericalFailure(Exception):
    pass


def _env(name: str) -> str | None:
    return os.environ.get(_ENV_PREFIX + name)


def _post(url: str | None, path: str, payload: dict) -> dict:
    """POST to a remote service, or to the in-process application."""
    if url:
        with httpx.Client(base_url=url, timeout=None) as client:
            resp = client.post(path, json=payload)
        return _handle(resp)

    async def _inproc() -> httpx.Response:
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://einsys.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return _handle(asyncio.run(_inproc()))


def _handle(resp: httpx.Response) -> dict:
    if resp.status_code in (400, 422):
        raise _ConfigFailure(_detail(resp))
    if resp.status_code >= 500:
        raise _NumericalFailure(_detail(resp))
    resp.raise_for_status()
    return resp.json()


def _detail(resp: httpx.Response) -> str:
    try:
        return json.dumps(resp.json().get("detail"))
    except Exception:
        return resp.text


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ConfigFailure(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise _ConfigFailure(f"config {path} must hold a JSON object")
    return data


def _resolved(flag, env_name: str, cast):
    if flag is not None:
        return flag
    raw = _env(env_name)
    if raw is not None:
        try:
            return cast(raw)
        except ValueError as exc:
            raise _ConfigFailure(f"bad {_ENV_PREFIX}{env_name}: {raw!r}") from exc
    return None


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_bytes(text.encode("utf-8"))


def _experiment_payload(args) -> dict:
    payload = _load_config(args.config)
    seed = _resolved(args.seed, "SEED", int)
    threads = _resolved(args.threads, "THREADS", int)
    max_bits = _resolved(args.max_bits, "MAX_BITS", int)
    if seed is not None:
        payload["master_seed"] = seed
    if threads is not None:
        payload["n_threads"] = threads
    if max_bits is not None:
        payload["max_bits_per_point"] = max_bits
    return payload


def _cmd_experiment(args, path: str) -> int:
    body = _post(args.url, path, _experiment_payload(args))
    _write_output(body["csv"], args.out)
    return EXIT_OK


def _cmd_export_tn(args) -> int:
    if args.config is None:
        raise _ConfigFailure("export-tn requires --config with a network spec")
    spec = _load_config(args.config)
    body = _post(args.url, "/tn/export", spec)
    _write_output(body["dot"], args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    payload = {}
    seed = _resolved(args.seed, "SEED", int)
    if seed is not None:
        payload["seed"] = seed
    body = _post(args.url, "/verify", payload)
    lines = []
    for s in body["suites"]:
        status = "PASS" if s["passed"] else "FAIL"
        lines.append(
            f"{s['name']:<28} cases={s['cases']:<3d} max_residual={s['max_residual']:.3e}"
            f" tol={s['tolerance']:.1e} {status}"
        )
    n_pass = sum(1 for s in body["suites"] if s["passed"])
    overall = "PASS" if body["ok"] else "FAIL"
    lines.append(f"verification: {overall} ({n_pass}/{len(body['suites'])} suites)")
    report = "\n".join(lines) + "\n"
    _write_output(report, args.out)
    if args.out is not None:
        sys.stdout.write(report)
    return EXIT_OK if body["ok"] else EXIT_NUMERICAL


def _build_parser() -> _Parser:
    parser = _Parser(prog="einsys", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--config", metavar="PATH", help="JSON configuration file")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--url", default=_env("URL"), metavar="URL",
                       help="remote service base URL (default: run in-process)")

    for name, help_text in (
        ("ber-vs-snr", "sweep Eb/N0 and emit BER/NMSE rows as CSV"),
        ("ber-vs-users", "sweep the number of users at fixed Eb/N0"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--threads", type=int, help="worker threads (default: machine parallelism)")
        p.add_argument("--max-bits", type=int, help="per-point bit cap override")

    p = sub.add_parser("export-tn", help="render a tensor-network spec to Graphviz DOT")
    common(p)

    p = sub.add_parser("verify", help="run the self-verification suites")
    common(p)
    p.add_argument("--seed", type=int, help="suite seed override")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ber-vs-snr":
            return _cmd_experiment(args, "/experiments/ber-vs-snr")
        if args.command == "ber-vs-users":
            return _cmd_experiment(args, "/experiments/ber-vs-users")
        if args.command == "export-tn":
            return _cmd_export_tn(args)
        if args.command == "verify":
            return _cmd_verify(args)
        parser.error(f"unknown command {args.command!r}")
    except _ConfigFailure as exc:
        sys.stderr.write(f"einsys: configuration error: {exc}\n")
        return EXIT_CONFIG
    except _NumericalFailure as exc:
        sys.stderr.write(f"einsys: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except httpx.HTTPError as exc:
        sys.stderr.write(f"einsys: transport error: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
