"""Pydantic request/response models for the HTTP service.

Requests reuse the strict config sections; responses mirror the report
dictionaries produced by the runner.
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel

from ..config import (
    KernelGridConfig,
    MCConfig,
    ModelConfig,
    OptimizerConfig,
    StrictModel,
)


class OptimizeRequest(StrictModel):
    model: ModelConfig = ModelConfig(kind="optical")
    optimizer: OptimizerConfig = OptimizerConfig()
    threads: int = 0


class BoundCurveRequest(StrictModel):
    lambda_grid: List[float]
    optimizer: OptimizerConfig = OptimizerConfig()
    threads: int = 0


class VerifyRequest(StrictModel):
    samples: int = 100_000


class MCRequest(StrictModel):
    model: ModelConfig = ModelConfig(kind="optical")
    mc: MCConfig


class KernelsRequest(StrictModel):
    kernels: KernelGridConfig


class PointOut(BaseModel):
    b0: float
    b1: float
    b2: float
    x: float


class RegionOut(BaseModel):
    n: int
    value: float


class TailOut(BaseModel):
    certified_up_to: Optional[int]
    last_value: Optional[float]


class OptimizeResponse(BaseModel):
    command: str
    model: dict
    point: PointOut
    value: float
    converted_value: float
    threshold: float
    achieving_index: int
    tail: TailOut
    per_region: List[RegionOut]


class CurveRow(BaseModel):
    cutoff: float
    threshold: float


class BoundCurveResponse(BaseModel):
    command: str
    rows: List[CurveRow]


class CheckRow(BaseModel):
    name: str
    passed: bool
    residual: float
    tolerance: float


class VerifyResponse(BaseModel):
    command: str
    rows: List[CheckRow]
    all_passed: bool


class MCResponse(BaseModel):
    command: str
    model: dict
    alpha: float
    horizon: float
    dt: float
    count: int
    action_mean: float
    action_stderr: float
    log_mean_exp: float
    jensen_consistent: bool


class KernelRow(BaseModel):
    d: float
    tau: float
    cutoff: float
    closed_form: float
    oracle: float
    rel_diff: float


class KernelsResponse(BaseModel):
    command: str
    rows: List[KernelRow]
    worst_rel_diff: float


class HealthResponse(BaseModel):
    status: str
    version: str
