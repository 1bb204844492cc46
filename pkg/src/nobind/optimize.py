"""Minimax search for the no-binding constant.

The infinite family of per-region brackets is minimized through its first two
members F0, F1 over (b0, b1, b2, x); the remaining regions are covered by the
linear tail rule, whose monotonicity is certified numerically up to N_check.
Multi-start Nelder-Mead with seed-derived starting points keeps every report
bit-reproducible.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .bounds import ModelSpec, Nelson, Optical, bracket_n, bracket_zero
from .errors import NoConvergence, NobindError, TailViolation, UncertifiedTail
from .partition import LinearTail, PartitionSchedule, make_schedule

log = logging.getLogger(__name__)

PENALTY = 1e15
PER_REGION_CAP = 64  # entries of (n, F_n) kept inside a report


@dataclass(frozen=True)
class TailCertificate:
    n_checked: int
    monotone: bool
    first_violation: Optional[int]
    last_value: float


@dataclass(frozen=True)
class OptimumReport:
    model: ModelSpec
    point: tuple[float, float, float, float]  # (b0, b1, b2, x)
    value: float
    per_region: tuple[tuple[int, float], ...]
    achieving_index: int
    tail_certified_up_to: Optional[int]
    tail_last_value: Optional[float]
    converted_value: float


def _point_schedule(b0: float, b1: float, b2: float, x: float) -> PartitionSchedule:
    return make_schedule((b0, b1, b2), (x, x), LinearTail(b2, x))


def evaluate_truncated(model: ModelSpec, b0, b1, b2, x) -> tuple[float, float]:
    """(F0, F1) at a candidate point; raises on domain violations."""
    f0 = bracket_zero(model, b0, b1)
    f1 = bracket_n(model, 1, _point_schedule(b0, b1, b2, x))
    return f0, f1


def _objective(model: ModelSpec, params: np.ndarray) -> float:
    b0, b1, b2, x = params
    bad = 0.0
    for b in (b0, b1, b2):
        if not b > 1e-12:
            bad += 1.0 + abs(b)
    if not 1e-6 < x < 1 - 1e-6:
        bad += 1.0 + abs(x)
    if bad:
        return PENALTY * bad
    try:
        schedule = _point_schedule(b0, b1, b2, x)
        f0 = bracket_zero(model, b0, b1)
        f1 = bracket_n(model, 1, schedule)
        f2 = bracket_n(model, 2, schedule)
    except NobindError:
        return PENALTY
    # keep the search inside the certifiable region: the tail rule needs
    # F_2 <= F_1, so a violation at the first tail step is penalized smoothly
    return max(f0, f1) + 1e4 * max(0.0, f2 - f1)


def _start_points(starts: int, seed: int) -> np.ndarray:
    """Deterministic log-uniform starts in b in [0.5, 50], x in [0.1, 0.9]."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    bs = np.exp(rng.uniform(math.log(0.5), math.log(50.0), size=(starts, 3)))
    xs = rng.uniform(0.1, 0.9, size=(starts, 1))
    return np.hstack([bs, xs])


def minimize_truncated(
    model: ModelSpec,
    starts: int = 32,
    tol: float = 1e-8,
    seed: int = 0,
    threads: int = 1,
    extra_starts: Sequence[Sequence[float]] = (),
) -> OptimumReport:
    """Multi-start simplex minimization of max(F0, F1).

    Deterministic for a given seed: starting points come from a counter-based
    generator and results merge by (value, lexicographic point).
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if starts < 1:
        raise ValueError(f"need at least one start, got {starts}")
    x0s = list(_start_points(starts, seed))
    x0s.extend(np.asarray(p, dtype=float) for p in extra_starts)

    def run(x0):
        res = minimize(
            lambda p: _objective(model, p),
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": tol, "maxfev": 100_000},
        )
        return res

    if threads and threads != 1:
        with ThreadPoolExecutor(max_workers=threads if threads > 0 else None) as ex:
            results = list(ex.map(run, x0s))
    else:
        results = [run(x0) for x0 in x0s]

    candidates = [
        (float(r.fun), tuple(float(v) for v in r.x))
        for r in results
        if math.isfinite(r.fun) and r.fun < PENALTY / 2
    ]
    if not candidates:
        raise NoConvergence("no start converged to a finite bracket value")
    candidates.sort(key=lambda c: (c[0], c[1]))
    _, point = candidates[0]
    b0, b1, b2, x = point
    # the winning point must reproduce its value through the objective
    if not math.isclose(
        _objective(model, np.asarray(point)), candidates[0][0],
        rel_tol=1e-12, abs_tol=1e-12,
    ):
        raise NoConvergence(
            f"re-evaluation mismatch at {point}: reported {candidates[0][0]}"
        )
    f0, f1 = evaluate_truncated(model, b0, b1, b2, x)
    value = max(f0, f1)
    if f0 > 0 and f1 > 0:
        imbalance = abs(f0 - f1) / max(f0, f1)
        log.info("optimum balance |F0-F1|/max = %.3g", imbalance)
    return OptimumReport(
        model=model,
        point=point,
        value=value,
        per_region=((0, f0), (1, f1)),
        achieving_index=0 if f0 >= f1 else 1,
        tail_certified_up_to=None,
        tail_last_value=None,
        converted_value=value * math.sqrt(2.0),
    )


def evaluate_point(model: ModelSpec, point: Sequence[float]) -> OptimumReport:
    """Report for a fixed (b0, b1, b2, x) point, no search."""
    b0, b1, b2, x = (float(v) for v in point)
    f0, f1 = evaluate_truncated(model, b0, b1, b2, x)
    value = max(f0, f1)
    return OptimumReport(
        model=model,
        point=(b0, b1, b2, x),
        value=value,
        per_region=((0, f0), (1, f1)),
        achieving_index=0 if f0 >= f1 else 1,
        tail_certified_up_to=None,
        tail_last_value=None,
        converted_value=value * math.sqrt(2.0),
    )


def build_full_schedule(
    opt: OptimumReport, n_check: int = 10_000
) -> tuple[PartitionSchedule, TailCertificate]:
    """Extend the optimum by the linear tail rule and certify F_{n+1} <= F_n.

    Raises TailViolation at the first offending index; the exception carries
    the certificate on its `certificate` attribute.
    """
    if n_check < 10:
        raise ValueError(f"n_check must be at least 10, got {n_check}")
    b0, b1, b2, x = opt.point
    schedule = _point_schedule(b0, b1, b2, x)
    prev = bracket_n(opt.model, 1, schedule)
    first_violation = None
    last = prev
    for n in range(2, n_check + 1):
        cur = bracket_n(opt.model, n, schedule)
        if cur > prev and first_violation is None:
            first_violation = n - 1
        prev = cur
        last = cur
    cert = TailCertificate(
        n_checked=n_check,
        monotone=first_violation is None,
        first_violation=first_violation,
        last_value=last,
    )
    log.info(
        "tail at N_check=%d: F_N = %.6g (empirical limit estimate)", n_check, last
    )
    if not cert.monotone:
        exc = TailViolation(cert.first_violation)
        exc.certificate = cert
        raise exc
    return schedule, cert


def certify(
    model: ModelSpec, opt: OptimumReport, n_check: int = 10_000
) -> OptimumReport:
    """Return a tail-certified copy of the report (per_region extended, capped)."""
    schedule, cert = build_full_schedule(opt, n_check)
    extra = tuple(
        (n, bracket_n(model, n, schedule))
        for n in range(2, min(n_check, PER_REGION_CAP) + 1)
    )
    return replace(
        opt,
        per_region=opt.per_region + extra,
        tail_certified_up_to=cert.n_checked,
        tail_last_value=cert.last_value,
    )


def no_binding_constant(model: ModelSpec, opt: OptimumReport) -> float:
    """The certified threshold: the alpha-multiplier C for optical/piezo, or the
    full A(alpha) for Nelson (whose alpha^6 term is not factorable)."""
    if opt.tail_certified_up_to is None:
        raise UncertifiedTail("report has no tail certificate")
    if isinstance(model, Nelson):
        return opt.value * model.alpha
    return opt.value


def kinetic_rescale(value: float) -> float:
    """Convert a threshold to the p^2 kinetic-energy convention (multiply by sqrt 2)."""
    if value < 0:
        raise ValueError(f"value must be nonnegative, got {value}")
    return value * math.sqrt(2.0)


def lambda_curve(
    lambda_grid: Sequence[float],
    starts: int = 32,
    tol: float = 1e-8,
    seed: int = 0,
    n_check: int = 10_000,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Certified piezo threshold C(cutoff) on a grid, warm-started point to point.

    Output is asserted monotone nondecreasing; a violating point is
    re-optimized with more starts before failing.
    """
    from .bounds import Piezo

    for lam in lambda_grid:
        if not lam > 0:
            raise ValueError(f"cutoff grid must be positive, got {lam}")
    rows: list[tuple[float, float]] = []
    prev_point = None
    prev_value = None
    for lam in lambda_grid:
        model = Piezo(cutoff=lam)
        extra = [prev_point] if prev_point is not None else []
        opt = minimize_truncated(
            model, starts=starts, tol=tol, seed=seed, threads=threads,
            extra_starts=extra,
        )
        if prev_value is not None and opt.value < prev_value:
            opt = minimize_truncated(
                model, starts=4 * starts, tol=tol, seed=seed + 1, threads=threads,
                extra_starts=extra,
            )
            if opt.value < prev_value:
                raise NoConvergence(
                    f"curve not monotone at cutoff {lam}: {opt.value} < {prev_value}"
                )
        opt = certify(model, opt, n_check)
        c = no_binding_constant(model, opt)
        rows.append((float(lam), c))
        prev_point = opt.point
        prev_value = opt.value
    return rows
