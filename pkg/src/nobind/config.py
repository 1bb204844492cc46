"""Run configuration: strict JSON schema shared by the CLI and the service.

Unknown keys are rejected everywhere so a typo cannot silently change a
physics constant.
"""

from __future__ import annotations

import json
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .bounds import ModelSpec, Nelson, Optical, Piezo
from .errors import MissingField, ParseError, UnknownKey

Command = Literal["optimize", "bound-curve", "verify", "mc", "kernels"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(StrictModel):
    kind: Literal["optical", "piezo", "nelson"]
    cutoff: Optional[float] = None
    d1: Optional[float] = None
    d2: Optional[float] = None
    alpha: Optional[float] = None

    @model_validator(mode="after")
    def _check_fields(self):
        if self.kind == "piezo":
            if self.cutoff is None:
                raise ValueError("piezo model requires 'cutoff'")
            if not self.cutoff > 0:
                raise ValueError(f"piezo cutoff must be positive, got {self.cutoff}")
        if self.kind == "nelson":
            missing = [f for f in ("d1", "d2", "alpha") if getattr(self, f) is None]
            if missing:
                raise ValueError(f"nelson model requires {', '.join(missing)}")
        return self

    def to_model(self) -> ModelSpec:
        if self.kind == "optical":
            return Optical()
        if self.kind == "piezo":
            return Piezo(cutoff=self.cutoff)
        return Nelson(d1=self.d1, d2=self.d2, alpha=self.alpha)


class OptimizerConfig(StrictModel):
    starts: int = 32
    tol: float = 1e-8
    n_check: int = 10_000
    seed: int = 0


class MCConfig(StrictModel):
    horizon: float
    dt: float
    count: int
    seed: int = 0
    alpha: float = 1.0
    dimension: int = 3


class KernelGridConfig(StrictModel):
    d: List[float]
    tau: List[float]
    cutoff: List[float]


class OutputConfig(StrictModel):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "json"


class RunConfig(StrictModel):
    command: Optional[Command] = None
    model: ModelConfig = ModelConfig(kind="optical")
    optimizer: OptimizerConfig = OptimizerConfig()
    mc: Optional[MCConfig] = None
    lambda_grid: List[float] = []
    kernels: Optional[KernelGridConfig] = None
    output: OutputConfig = OutputConfig()
    threads: int = 0

    @model_validator(mode="after")
    def _check_per_command(self):
        if self.command == "mc" and self.mc is None:
            raise ValueError("mc command requires the 'mc' section")
        if self.command == "kernels" and self.kernels is None:
            raise ValueError("kernels command requires the 'kernels' section")
        return self


def _raise_from_validation(exc: ValidationError):
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        if err["type"] == "extra_forbidden":
            raise UnknownKey(f"unknown key '{loc}'") from exc
        if err["type"] == "missing":
            raise MissingField(f"missing field '{loc}'") from exc
        if "requires" in err["msg"]:
            raise MissingField(f"{loc}: {err['msg']}" if loc else err["msg"]) from exc
    first = exc.errors()[0]
    loc = ".".join(str(p) for p in first["loc"])
    raise ParseError(f"invalid config at '{loc}': {first['msg']}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config; position-annotated errors on bad syntax."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ParseError("config root must be a JSON object")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        _raise_from_validation(exc)
        raise  # unreachable


def config_to_json(config: RunConfig) -> str:
    """Canonical JSON for a config (round-trips through parse_config)."""
    return json.dumps(config.model_dump(exclude_none=True), sort_keys=True, indent=2)
