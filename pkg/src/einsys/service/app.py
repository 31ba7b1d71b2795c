"""FastAPI application exposing the experiment runner, the tensor-network
exporter, and the self-verification suites.

Run it standalone with ``uvicorn einsys.service.app:app``; the CLI mounts the
same application in-process when no ``--url`` is given.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..experiments import (
    ConfigError,
    config_from_dict,
    results_to_csv,
    run_ber_vs_snr,
    run_ber_vs_users,
)
from ..tn import NetworkSpec, to_dot
from ..verify import run_verification
from .schemas import (
    CdmaOverrides,
    ExperimentResponse,
    HealthResponse,
    ResultModel,
    SuiteModel,
    TnExportResponse,
    TnSpecModel,
    VerifyRequest,
    VerifyResponse,
)


def _run_experiment(overrides: CdmaOverrides | None, experiment: str) -> ExperimentResponse:
    body = overrides.model_dump(exclude_none=True) if overrides else {}
    try:
        cfg = config_from_dict(body, experiment)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    try:
        runner = run_ber_vs_snr if experiment == "ber_vs_snr" else run_ber_vs_users
        results = runner(cfg)
    except np.linalg.LinAlgError as exc:
        raise HTTPException(status_code=500, detail=f"numerical failure: {exc}") from exc
    return ExperimentResponse(
        results=[ResultModel.from_result(r) for r in results],
        csv=results_to_csv(results, include_users=experiment == "ber_vs_users"),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="einsys", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/experiments/ber-vs-snr", response_model=ExperimentResponse)
    def ber_vs_snr(overrides: CdmaOverrides | None = None) -> ExperimentResponse:
        return _run_experiment(overrides, "ber_vs_snr")

    @app.post("/experiments/ber-vs-users", response_model=ExperimentResponse)
    def ber_vs_users(overrides: CdmaOverrides | None = None) -> ExperimentResponse:
        return _run_experiment(overrides, "ber_vs_users")

    @app.post("/tn/export", response_model=TnExportResponse)
    def tn_export(spec: TnSpecModel) -> TnExportResponse:
        try:
            net = NetworkSpec.from_dict(spec.model_dump())
            return TnExportResponse(dot=to_dot(net))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest | None = None) -> VerifyResponse:
        suites = run_verification((req or VerifyRequest()).seed)
        return VerifyResponse(
            ok=all(s.passed for s in suites),
            suites=[SuiteModel.from_suite(s) for s in suites],
        )

    return app


app = create_app()
