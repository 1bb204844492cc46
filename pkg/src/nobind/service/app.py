"""FastAPI service exposing the compute commands over HTTP.

Every endpoint is a thin wrapper around the runner; numeric failures map to
HTTP 422 (bad input) or 500 (numeric error) with the error class in the body.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import RunConfig
from ..errors import ConfigError, NobindError, NumericError
from ..runner import execute
from ..verify import run_all
from .schemas import (
    BoundCurveRequest,
    BoundCurveResponse,
    HealthResponse,
    KernelsRequest,
    KernelsResponse,
    MCRequest,
    MCResponse,
    OptimizeRequest,
    OptimizeResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(title="nobind", version=__version__)


def _run(config: RunConfig) -> dict:
    try:
        return execute(config).report
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")
    except NumericError as exc:
        raise HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}")
    except NobindError as exc:
        raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")


@app.get("/health", response_model=HealthResponse)
def health():
    return {"status": "ok", "version": __version__}


@app.post("/optimize", response_model=OptimizeResponse)
def optimize(req: OptimizeRequest):
    config = RunConfig(
        command="optimize",
        model=req.model,
        optimizer=req.optimizer,
        threads=req.threads,
    )
    return _run(config)


@app.post("/bound-curve", response_model=BoundCurveResponse)
def bound_curve(req: BoundCurveRequest):
    config = RunConfig(
        command="bound-curve",
        optimizer=req.optimizer,
        lambda_grid=req.lambda_grid,
        threads=req.threads,
    )
    return _run(config)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    try:
        results = run_all(req.samples)
    except NumericError as exc:
        raise HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}")
    except NobindError as exc:
        raise HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")
    return {
        "command": "verify",
        "rows": [r.as_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    }


@app.post("/mc", response_model=MCResponse)
def mc(req: MCRequest):
    config = RunConfig(command="mc", model=req.model, mc=req.mc)
    return _run(config)


@app.post("/kernels", response_model=KernelsResponse)
def kernels(req: KernelsRequest):
    config = RunConfig(command="kernels", kernels=req.kernels)
    return _run(config)
