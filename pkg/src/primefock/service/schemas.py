"""Request/response models for the service and the CLI thin client."""
from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = "primefock.v1"


class TruncationModel(BaseModel):
    p_max: int = Field(default=31, ge=2)
    a_max: int = Field(default=6, ge=1)
    omega_max: int = Field(default=6, ge=1)
    k_max: Optional[int] = None
    guard: int = Field(default=1, ge=0)


class TruncationOverrides(BaseModel):
    """Partial truncation: unset fields fall back to the suite's defaults."""

    p_max: Optional[int] = Field(default=None, ge=2)
    a_max: Optional[int] = Field(default=None, ge=1)
    omega_max: Optional[int] = Field(default=None, ge=1)
    k_max: Optional[int] = None
    guard: Optional[int] = Field(default=None, ge=0)


class ZEntry(BaseModel):
    prime: int = Field(ge=2)
    re: float
    im: float = 0.0


class VerifyRequest(BaseModel):
    suite: str
    truncation: Optional[TruncationOverrides] = None
    sigma: Optional[float] = None
    t: float = 0.0
    z: list[ZEntry] = Field(default_factory=list)
    tolerance: Optional[float] = None
    occupation_cap: Optional[int] = None
    seed: int = 0


class ReportModel(BaseModel):
    name: str
    residual: float
    tolerance: float
    passed: bool
    params: dict[str, Any] = Field(default_factory=dict)
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class VerifyResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    suite: str
    all_passed: bool
    reports: list[ReportModel]


class AmplitudeRow(BaseModel):
    k: int
    re: float
    im: float
    prob: float


class AmplitudesRequest(BaseModel):
    sigma: float
    t: float = 0.0
    truncation: TruncationModel = Field(default_factory=TruncationModel)
    z: list[ZEntry] = Field(default_factory=list)
    limit: Optional[int] = Field(default=None, ge=1)


class AmplitudesResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    rows: list[AmplitudeRow]
    residual_mass: float
    mass_parameter: float


class ExpectRequest(BaseModel):
    sigma: float
    t: float = 0.0
    observable: Literal["N", "N2", "BH", "tower"] = "N"
    truncation: TruncationModel = Field(default_factory=TruncationModel)
    z: list[ZEntry] = Field(default_factory=list)
    U: float = 0.0
    mu_chem: float = 0.0
    tau: float = 0.0
    order: int = Field(default=1, ge=1)


class ExpectResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    observable: str
    closed_form: float
    truncated: Optional[float]
    tolerance: float
    tail_bound: float


class PmfRequest(BaseModel):
    sigma: float
    t: float = 0.0
    n_max: int = Field(default=10, ge=0)


class PmfRow(BaseModel):
    n: int
    probability: float


class PmfResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    rows: list[PmfRow]
    total: float


class SpectrumRequest(BaseModel):
    sites: int = Field(default=5, ge=1, alias="N")
    particles: int = Field(default=3, ge=0, alias="n")
    gamma: float = 1.0
    delta: float = 0.0
    tau: Optional[float] = None
    tau_min: float = 0.0
    tau_max: float = 1.2
    tau_step: float = 0.01
    m_lowest: Optional[int] = Field(default=None, ge=1)
    sigma: float = 1.5
    t: float = 0.0

    model_config = {"populate_by_name": True}


class SpectrumRowModel(BaseModel):
    tau: float
    mode_rank: int
    eigenvalue: float
    alpha: list[int]


class SpectrumResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    metadata: dict[str, Any]
    rows: list[SpectrumRowModel]


class TransitionModel(BaseModel):
    tau_low: float
    tau_high: float
    old_alpha: list[int]
    new_alpha: list[int]


class TransitionsResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    metadata: dict[str, Any]
    transitions: list[TransitionModel]


class HealthResponse(BaseModel):
    status: str
    version: str
    schema_version: str = SCHEMA_VERSION
