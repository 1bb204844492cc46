"""Orchestration: dispatch a validated RunConfig to the compute modules and
assemble a serializable report.  Shared by the CLI and the HTTP service."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .bounds import Nelson, Optical, Piezo
from .config import RunConfig
from .kernels import KernelQuery, piezo_kernel
from .optimize import (
    certify,
    kinetic_rescale,
    lambda_curve,
    minimize_truncated,
    no_binding_constant,
)
from .paths import Free, PathEnsemble, mc_energy_probe
from .verify import run_all


@dataclass(frozen=True)
class RunOutcome:
    report: dict
    ok: bool  # all requested checks within tolerance


def _model_dict(model) -> dict:
    if isinstance(model, Optical):
        return {"kind": "optical"}
    if isinstance(model, Piezo):
        return {"kind": "piezo", "cutoff": model.cutoff}
    return {
        "kind": "nelson",
        "d1": model.d1,
        "d2": model.d2,
        "alpha": model.alpha,
    }


def run_optimize(config: RunConfig) -> RunOutcome:
    model = config.model.to_model()
    opts = config.optimizer
    opt = minimize_truncated(
        model,
        starts=opts.starts,
        tol=opts.tol,
        seed=opts.seed,
        threads=config.threads,
    )
    opt = certify(model, opt, opts.n_check)
    threshold = no_binding_constant(model, opt)
    report = {
        "command": "optimize",
        "model": _model_dict(model),
        "point": {
            "b0": opt.point[0],
            "b1": opt.point[1],
            "b2": opt.point[2],
            "x": opt.point[3],
        },
        "value": opt.value,
        "converted_value": kinetic_rescale(opt.value),
        "threshold": threshold,
        "achieving_index": opt.achieving_index,
        "tail": {
            "certified_up_to": opt.tail_certified_up_to,
            "last_value": opt.tail_last_value,
        },
        "per_region": [
            {"n": n, "value": f} for n, f in opt.per_region[:16]
        ],
    }
    return RunOutcome(report, ok=math.isfinite(opt.value))


def run_bound_curve(config: RunConfig) -> RunOutcome:
    opts = config.optimizer
    rows = lambda_curve(
        config.lambda_grid,
        starts=opts.starts,
        tol=opts.tol,
        seed=opts.seed,
        n_check=opts.n_check,
        threads=config.threads,
    )
    report = {
        "command": "bound-curve",
        "rows": [{"cutoff": lam, "threshold": c} for lam, c in rows],
    }
    ok = all(b >= a for (_, a), (_, b) in zip(rows, rows[1:]))
    return RunOutcome(report, ok=ok)


def run_verify(config: RunConfig) -> RunOutcome:
    results = run_all()
    report = {
        "command": "verify",
        "rows": [r.as_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    }
    return RunOutcome(report, ok=report["all_passed"])


def run_mc(config: RunConfig) -> RunOutcome:
    model = config.model.to_model()
    mc = config.mc
    ensemble = PathEnsemble(
        dimension=mc.dimension,
        horizon=mc.horizon,
        dt=mc.dt,
        count=mc.count,
        seed=mc.seed,
        endpoint_mode=Free(start=(0.0,) * mc.dimension),
    )
    stats = mc_energy_probe(model, mc.alpha, ensemble)
    jensen_ok = stats["log_mean_exp"] >= stats["action_mean"] - 1e-12
    report = {
        "command": "mc",
        "model": _model_dict(model),
        "alpha": mc.alpha,
        "horizon": mc.horizon,
        "dt": mc.dt,
        "count": mc.count,
        "action_mean": stats["action_mean"],
        "action_stderr": stats["action_stderr"],
        "log_mean_exp": stats["log_mean_exp"],
        "jensen_consistent": jensen_ok,
    }
    return RunOutcome(report, ok=jensen_ok)


def run_kernels(config: RunConfig) -> RunOutcome:
    grid = config.kernels
    rows = []
    worst = 0.0
    for d, tau, lam in itertools.product(grid.d, grid.tau, grid.cutoff):
        q = KernelQuery(d=d, tau=tau, cutoff=lam)
        closed = piezo_kernel(q)
        oracle = piezo_kernel(q, use_quadrature_oracle=True)
        scale = max(abs(closed), abs(oracle), 1e-300)
        rel = abs(closed - oracle) / scale
        worst = max(worst, rel)
        rows.append(
            {
                "d": d,
                "tau": tau,
                "cutoff": lam,
                "closed_form": closed,
                "oracle": oracle,
                "rel_diff": rel,
            }
        )
    report = {"command": "kernels", "rows": rows, "worst_rel_diff": worst}
    return RunOutcome(report, ok=worst < 1e-8)


_DISPATCH = {
    "optimize": run_optimize,
    "bound-curve": run_bound_curve,
    "verify": run_verify,
    "mc": run_mc,
    "kernels": run_kernels,
}


def execute(config: RunConfig) -> RunOutcome:
    if config.command is None:
        raise ValueError("config has no command")
    return _DISPATCH[config.command](config)
