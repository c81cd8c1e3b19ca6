"""Pydantic request/response models for the HTTP service and the CLI.

Wire-format rules: every response document carries a schema version "v": 1
and echoes {seed, tol, version}; index values are serialized exclusively as
{"doubled": int}, never as floats.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .. import __version__

SCHEMA_VERSION = 1


class HalfIntegerModel(BaseModel):
    doubled: int


class InertiaModel(BaseModel):
    n_pos: int
    n_neg: int
    n_zero: int


class BlocksModel(BaseModel):
    """Return-map blocks: either the four blocks or the assembled matrix."""

    n: int = Field(ge=1)
    A: Optional[list[list[float]]] = None
    B: Optional[list[list[float]]] = None
    C: Optional[list[list[float]]] = None
    D: Optional[list[list[float]]] = None
    Phi: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def check_one_form(self):
        has_blocks = all(getattr(self, k) is not None for k in ("A", "B", "C", "D"))
        if not has_blocks and self.Phi is None:
            raise ValueError("provide either all of A, B, C, D or Phi")
        return self


class IndexEntryModel(BaseModel):
    """Result or error for one iterate and one method."""

    k: int
    method: str
    nondegenerate: bool
    s: Optional[HalfIntegerModel] = None
    sign_matrix_inertia: Optional[InertiaModel] = None
    error: Optional[str] = None


class RunEcho(BaseModel):
    """Reproducibility stamp present in every response."""

    v: int = SCHEMA_VERSION
    version: str = __version__
    seed: Optional[int] = None
    tol: Optional[float] = None


class IndexRequest(BaseModel):
    blocks: BlocksModel
    k_max: int = Field(default=1, ge=1, le=64)
    tol: Optional[float] = Field(default=None, gt=0)
    method: Literal["formula", "qform", "both"] = "formula"


class IndexResponse(RunEcho):
    n: int = 0
    results: list[IndexEntryModel] = []


class ChebRequest(BaseModel):
    k: int = Field(ge=0, le=512)
    x_min: float = -1.0
    x_max: float = 1.0
    points: int = Field(default=21, ge=2, le=100_000)

    @model_validator(mode="after")
    def check_range(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        return self


class ChebRowModel(BaseModel):
    k: int
    x: float
    t: float
    u: float


class ChebResponse(RunEcho):
    rows: list[ChebRowModel] = []


class VerifyRequest(BaseModel):
    n: int = Field(ge=1, le=8)
    trials: int = Field(ge=1, le=1_000_000)
    seed: int = 0
    k_max: int = Field(default=6, ge=1, le=32)
    methods: list[Literal["formula", "qform", "paths"]] = ["formula", "qform", "paths"]
    tol: Optional[float] = Field(default=None, gt=0)
    scale: float = Field(default=1.0, gt=0)
    workers: int = Field(default=1, ge=1, le=64)


class TrialOutcomeModel(BaseModel):
    trial: int
    n: int
    checked_k: list[int]
    skipped_k: dict[str, str]
    values: dict[str, dict[str, int]]
    agreed: bool
    blocks: Optional[dict] = None


class VerifyResponse(RunEcho):
    n: int = 0
    trials: int = 0
    k_max: int = 0
    methods: list[str] = []
    scale: float = 1.0
    checked: int = 0
    agreements: int = 0
    disagreements: list[TrialOutcomeModel] = []
    skipped: dict[str, int] = {}
    ok: bool = True


class OrbitRequest(BaseModel):
    system: str
    seed_point: list[float]
    tol: float = Field(default=1e-11, gt=0)
    k_max: int = Field(default=4, ge=1, le=32)
    half_period: Optional[float] = Field(default=None, gt=0)
    energy: Optional[float] = None
    section_seed: int = 0


class OrbitSummaryModel(BaseModel):
    x: list[float]
    eta: float
    energy: float
    residual: float


class OrbitResponse(RunEcho):
    system: str = ""
    orbit: Optional[OrbitSummaryModel] = None
    blocks: Optional[dict] = None
    block_residuals: dict[str, float] = {}
    indices: list[IndexEntryModel] = []


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str = __version__
