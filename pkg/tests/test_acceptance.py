"""Acceptance gate: the nine headline criteria, one pass/fail line each.

Each test prints `criterion N [PASS|FAIL]: <summary>` so the suite's output
doubles as the acceptance report.  Expensive artifacts (the certified optical
optimum) are shared across criteria through module-scoped fixtures.
"""

import math
import time

import numpy as np
import pytest

from nobind.bounds import Nelson, Optical, Piezo, c_constants
from nobind.kernels import (
    KernelQuery,
    jensen_rate,
    piezo_kernel,
    renorm_integral,
    separation_bound_check,
)
from nobind.optimize import (
    build_full_schedule,
    certify,
    evaluate_point,
    kinetic_rescale,
    lambda_curve,
    minimize_truncated,
    no_binding_constant,
)
from nobind.paths import (
    Free,
    PathEnsemble,
    expected_optical_self_action,
    mc_energy_probe,
)
from nobind.verify import (
    PAPER_POINT,
    check_brace_bound,
    check_kernel_identity,
    check_partition_identity,
    check_pinning,
)


def _report(num: int, ok: bool, summary: str):
    status = "PASS" if ok else "FAIL"
    print(f"\ncriterion {num} [{status}]: {summary}")
    assert ok, f"criterion {num} failed: {summary}"


@pytest.fixture(scope="module")
def optical_optimum():
    start = time.perf_counter()
    opt = minimize_truncated(Optical(), starts=32, seed=0)
    elapsed = time.perf_counter() - start
    return opt, elapsed


def test_criterion_1_published_optimum(optical_optimum):
    """Reference point below 25.9 and an independent search at least as good."""
    fixed = evaluate_point(Optical(), PAPER_POINT)
    opt, elapsed = optical_optimum
    ok = fixed.value < 25.9 and opt.value <= 25.9 and elapsed < 10.0
    _report(
        1, ok,
        f"reference point max(F0, F1) = {fixed.value:.6f} < 25.9; "
        f"optimizer value = {opt.value:.6f} <= 25.9 in {elapsed:.2f} s (< 10 s)",
    )


def test_criterion_2_conversion_chain(optical_optimum):
    opt, _ = optical_optimum
    converted = kinetic_rescale(opt.value)
    reduction = (52.1 - converted) / 52.1 * 100
    ok = converted < 36.7 and reduction > 29.6
    _report(
        2, ok,
        f"converted threshold = {converted:.6f} < 36.7; "
        f"reduction vs 52.1 = {reduction:.3f}% > 29.6%",
    )


def test_criterion_3_tail_certificate():
    rep = evaluate_point(Optical(), PAPER_POINT)
    start = time.perf_counter()
    _, cert = build_full_schedule(rep, n_check=10_000)
    elapsed = time.perf_counter() - start
    ok = cert.monotone and cert.n_checked == 10_000 and elapsed < 5.0
    _report(
        3, ok,
        f"F_(n+1) <= F_n for 1 <= n <= 10^4 (last value {cert.last_value:.4f}) "
        f"in {elapsed:.2f} s (< 5 s)",
    )


def test_criterion_4_kernel_identity_and_brace_bound():
    start = time.perf_counter()
    identity = check_kernel_identity()
    brace = check_brace_bound(samples=100_000)
    elapsed = time.perf_counter() - start
    ok = identity.passed and brace.passed and elapsed < 60.0
    _report(
        4, ok,
        f"kernel closed form vs oracle worst rel diff = {identity.residual:.3e}"
        f" < 1e-8 on the log grid; brace factor within [0, 2] on 1e5 random "
        f"queries (excess {brace.residual:.1e}); {elapsed:.1f} s (< 60 s)",
    )


def test_criterion_5_renormalization_integral():
    worst = 0.0
    for lam in (0.5, 1.0, 2.0, 10.0):
        closed = 8 * math.pi * math.log1p(lam / 2.0)
        worst = max(worst, abs(renorm_integral(lam) - closed))
    ok = worst < 1e-10
    _report(
        5, ok,
        f"quadrature vs 8 pi log(1 + cutoff/2) worst abs diff = {worst:.3e} "
        f"< 1e-10 for cutoff in {{0.5, 1, 2, 10}}",
    )


def test_criterion_6_mc_probe():
    start = time.perf_counter()
    ensemble = PathEnsemble(
        dimension=3, horizon=8.0, dt=1e-2, count=1000, seed=2024,
        endpoint_mode=Free(start=(0.0, 0.0, 0.0)),
    )
    stats = mc_energy_probe(Optical(), 1.0, ensemble)
    expected = expected_optical_self_action(8.0, 1e-2, 1.0)
    elapsed = time.perf_counter() - start
    z = (stats["action_mean"] - expected) / stats["action_stderr"]
    jensen_ok = stats["log_mean_exp"] >= stats["action_mean"]
    ok = abs(z) < 3 and jensen_ok and elapsed < 300.0
    _report(
        6, ok,
        f"1000-path optical action mean {stats['action_mean']:.4f} vs "
        f"Gaussian-identity expectation {expected:.4f} (z = {z:.2f}, |z| < 3); "
        f"log-mean-exp >= mean: {jensen_ok}; {elapsed:.1f} s (< 300 s)",
    )


def test_criterion_7_partition_and_pinning():
    partition = check_partition_identity(samples=100_000)
    pinning = check_pinning()
    ok = partition.passed and pinning.passed
    _report(
        7, ok,
        f"partition identity residual = {partition.residual:.3e} < 1e-12 on "
        f"1e5 samples; pinning Rayleigh quotient residual = "
        f"{pinning.residual:.3e} < 1e-8",
    )


def test_criterion_8_separation_estimate():
    worst_excess = -math.inf
    for D in (0.1, 1.0, 10.0):
        for T in (0.01, 1.0, 100.0, 1000.0):
            r = separation_bound_check(D, T)
            worst_excess = max(worst_excess, r["exact"] - r["bound"])
    r = separation_bound_check(1.0, 1000.0)
    ratio = r["exact"] / r["bound"]
    ok = worst_excess <= 0 and 0.99 < ratio <= 1.0
    _report(
        8, ok,
        f"exact <= 8 pi^2 T / D on the whole (D, T) grid (worst excess "
        f"{worst_excess:.3e}); saturation ratio at T/D = 1e3 is {ratio:.4f} "
        f"in (0.99, 1]",
    )


def test_criterion_9_cutoff_curve_and_nelson_identity():
    grid = [0.5, 1.0, 2.0, 5.0, 10.0]
    rows = lambda_curve(grid, starts=16, seed=0, n_check=1000)
    thresholds = [c for _, c in rows]
    monotone = all(b >= a for a, b in zip(thresholds, thresholds[1:]))
    finite = all(math.isfinite(c) for c in thresholds)

    lam = 2.0
    piezo = Piezo(cutoff=lam)
    nelson = Nelson(d1=8 * c_constants(lam).c2, d2=0.0, alpha=1.0)
    p_opt = certify(piezo, minimize_truncated(piezo, starts=16, seed=0), 1000)
    n_opt = certify(nelson, minimize_truncated(nelson, starts=16, seed=0), 1000)
    bitwise = no_binding_constant(piezo, p_opt) == no_binding_constant(
        nelson, n_opt
    )
    ok = monotone and finite and bitwise
    _report(
        9, ok,
        f"threshold curve over 5 cutoffs {['%.2f' % c for c in thresholds]} "
        f"monotone nondecreasing and finite; Nelson(d2=0, d1=8*C2) reproduces "
        f"the piezo threshold bit-for-bit: {bitwise}",
    )
