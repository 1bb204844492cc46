"""Self-contained invariant suite: each check recomputes a quantity two ways
and reports the residual against its tolerance.  Used by the `verify` CLI
command and the acceptance tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import c_constants
from .kernels import (
    KernelQuery,
    piezo_kernel,
    renorm_integral,
    separation_bound_check,
)
from .partition import (
    LinearTail,
    make_schedule,
    phi_eval,
    pinning_diagnostics,
)

PAPER_POINT = (7.27, 3.44, 3.44, 0.702)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
        }


def reference_schedule():
    b0, b1, b2, x = PAPER_POINT
    return make_schedule((b0, b1, b2), (x, x), LinearTail(b2, x))


def check_partition_identity(samples: int = 100_000, seed: int = 0) -> CheckResult:
    """|sum_n phi_n^2(t) - 1| < 1e-12 on uniform plus log-uniform samples."""
    sched = reference_schedule()
    t_max = sched.partial_sum(sched.truncation + 5)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    half = samples // 2
    ts = np.concatenate([
        rng.uniform(0.0, t_max, half),
        np.exp(rng.uniform(math.log(1e-6), math.log(t_max), samples - half)),
    ])
    worst = 0.0
    for t in ts:
        m = 0
        while sched.partial_sum(m) < t:
            m += 1
        total = phi_eval(m, t, sched) ** 2
        if m >= 1:
            total += phi_eval(m - 1, t, sched) ** 2
        worst = max(worst, abs(total - 1.0))
    return CheckResult("partition_identity", worst < 1e-12, worst, 1e-12)


def check_pinning(radii=(0.5, 1.0, 7.27 / 4)) -> CheckResult:
    """Rayleigh quotient of the pinning profile equals pi^2/(2 R^2) to 1e-8,
    and the profile is L2-normalized."""
    worst = 0.0
    for r in radii:
        diag = pinning_diagnostics(r, quad_tol=1e-11)
        worst = max(worst, abs(diag["l2_norm"] - 1.0))
        target = math.pi ** 2 / (2 * r * r)
        rayleigh = diag["localization_error"] / diag["l2_norm"]
        worst = max(worst, abs(rayleigh - target) / target)
    return CheckResult("pinning_rayleigh", worst < 1e-8, worst, 1e-8)


def kernel_grid():
    ds = np.logspace(-3, 3, 7)
    taus = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0]
    cutoffs = [0.5, 1.0, 2.0, 10.0]
    return [(d, tau, lam) for d in ds for tau in taus for lam in cutoffs]


def check_kernel_identity() -> CheckResult:
    """Closed-form kernel vs oscillatory quadrature oracle, 1e-8 relative."""
    worst = 0.0
    for d, tau, lam in kernel_grid():
        q = KernelQuery(d=d, tau=tau, cutoff=lam)
        closed = piezo_kernel(q)
        oracle = piezo_kernel(q, use_quadrature_oracle=True)
        scale = max(abs(closed), abs(oracle), 4 * math.pi / (d * d + tau * tau))
        worst = max(worst, abs(closed - oracle) / scale)
    return CheckResult("kernel_identity", worst < 1e-8, worst, 1e-8)


def check_brace_bound(samples: int = 100_000, seed: int = 1) -> CheckResult:
    """Brace factor stays in [0, 2] on random (d, tau, cutoff) queries."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    d = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), samples))
    tau = rng.uniform(0.0, 100.0, samples)
    lam = np.exp(rng.uniform(math.log(0.1), math.log(50.0), samples))
    sin_term = tau * lam * np.sinc(lam * d / math.pi)
    vals = 1.0 - np.exp(-lam * tau) * (sin_term + np.cos(lam * d))
    worst = float(max(np.max(vals - 2.0), np.max(-vals), 0.0))
    return CheckResult("brace_bound", worst <= 1e-12, worst, 1e-12)


def check_renorm_integral(cutoffs=(0.5, 1.0, 2.0, 10.0)) -> CheckResult:
    """Counterterm quadrature equals 8 pi log(1 + cutoff/2) to 1e-10, and agrees
    with the independent C1 code path."""
    worst = 0.0
    for lam in cutoffs:
        q = renorm_integral(lam)
        closed = 8 * math.pi * math.log1p(lam / 2.0)
        worst = max(worst, abs(q - closed))
        worst = max(worst, abs(q - c_constants(lam).c1))
    return CheckResult("renorm_integral", worst < 1e-10, worst, 1e-10)


def check_separation_bound() -> CheckResult:
    """exact <= bound on a (D, T) grid, ratio > 0.99 at T/D = 1e3."""
    ok = True
    worst = 0.0
    for D in (0.1, 1.0, 10.0):
        for T in (0.01, 1.0, 100.0):
            r = separation_bound_check(D, T)
            excess = r["exact"] - r["bound"]
            worst = max(worst, excess)
            ok = ok and excess <= 0
    r = separation_bound_check(1.0, 1000.0)
    ratio = r["exact"] / r["bound"]
    ok = ok and 0.99 < ratio <= 1.0
    return CheckResult("separation_bound", ok, worst, 0.0)


def run_all(samples: int = 100_000) -> list[CheckResult]:
    return [
        check_partition_identity(samples),
        check_pinning(),
        check_kernel_identity(),
        check_brace_bound(samples),
        check_renorm_integral(),
        check_separation_bound(),
    ]
