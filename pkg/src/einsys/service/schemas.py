"""Pydantic request/response models for the einsys service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict

from ..cdma import CdmaResult
from ..verify import DEFAULT_SEED, SuiteResult


class CdmaOverrides(BaseModel):
    """Partial experiment configuration; unset fields fall back to the
    endpoint's baseline experiment defaults."""

    model_config = ConfigDict(extra="forbid")

    spreading_length: int | None = None
    n_users: int | None = None
    n_tx: int | None = None
    n_rx: int | None = None
    snr_db_grid: list[float] | None = None
    user_grid: list[int] | None = None
    fixed_snr_db: tuple[float, float] | None = None
    es: float | None = None
    constellation: str | None = None
    min_bit_errors: int | None = None
    n_channel_realizations: int | None = None
    frames_per_realization: int | None = None
    max_bits_per_point: int | None = None
    master_seed: int | None = None
    n_threads: int | None = None


class ResultModel(BaseModel):
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

    @classmethod
    def from_result(cls, r: CdmaResult) -> "ResultModel":
        return cls(**r.__dict__)


class ExperimentResponse(BaseModel):
    results: list[ResultModel]
    csv: str


class TnNodeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    shape: list[int]
    kind: str = "tensor"


class TnEdgeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: str
    mode_a: int
    b: str
    mode_b: int
    style: str = "product"


class TnSpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nodes: list[TnNodeModel] = []
    edges: list[TnEdgeModel] = []


class TnExportResponse(BaseModel):
    dot: str


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = DEFAULT_SEED


class SuiteModel(BaseModel):
    name: str
    cases: int
    max_residual: float
    tolerance: float
    passed: bool

    @classmethod
    def from_suite(cls, s: SuiteResult) -> "SuiteModel":
        return cls(
            name=s.name,
            cases=s.cases,
            max_residual=s.max_residual,
            tolerance=s.tolerance,
            passed=s.passed,
        )


class VerifyResponse(BaseModel):
    ok: bool
    suites: list[SuiteModel]


class HealthResponse(BaseModel):
    status: str
    version: str
