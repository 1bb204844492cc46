"""Per-region bracket functions and cutoff-dependent coupling constants.

The no-binding threshold for each model is the supremum over regions of the
bracket values computed here; region 0 covers small interparticle distance,
region n >= 1 the n-th shell of the partition.  The piezo/Nelson brackets
depend on the cutoff only through C1, C2 below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.integrate import fixed_quad
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    NonPositiveWidth,
    PinningViolation,
    QuadratureFailure,
    RatioNotAboveOne,
)
from .partition import PartitionSchedule

PI = math.pi
PI2 = math.pi ** 2
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Optical:
    """Optical polaron; no cutoff, coupling enters linearly."""


@dataclass(frozen=True)
class Piezo:
    """Piezoelectric polaron with ultraviolet cutoff (Debye wave number)."""

    cutoff: float

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError(f"piezo cutoff must be positive, got {self.cutoff}")


@dataclass(frozen=True)
class Nelson:
    """Massless Nelson model; d1, d2 are user-supplied lower-bound constants."""

    d1: float
    d2: float
    alpha: float

    def __post_init__(self):
        if self.d1 < 0 or self.d2 < 0 or self.alpha < 0:
            raise ValueError("nelson constants d1, d2 and alpha must be nonnegative")


ModelSpec = Union[Optical, Piezo, Nelson]


@dataclass(frozen=True)
class CutoffConstants:
    c1: float
    c2: float
    phi_sup: float
    phi_over_x_l1: float


def phi_shape(x):
    """(sin x - x cos x) / x^2, continuous at 0 (series below x < 1e-2).

    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("phi_shape requires x >= 0")
    small = arr < 1e-2
    xb = np.where(small, 1.0, arr)
    main = (np.sin(xb) - xb * np.cos(xb)) / (xb * xb)
    series = arr / 3 - arr ** 3 / 30 + arr ** 5 / 840
    out = np.where(small, series, main)
    return float(out) if out.ndim == 0 else out


def phi_shape_zeros(x_max: float) -> list[float]:
    """Positive zeros of sin x - x cos x (tan x = x) up to x_max, bracketed numerically."""
    zeros = []
    k = 1
    g = lambda x: math.sin(x) - x * math.cos(x)
    while k * PI < x_max:
        hi = min((k + 0.5) * PI, x_max)
        if g(k * PI) * g(hi) < 0:
            zeros.append(brentq(g, k * PI, hi, xtol=1e-13, rtol=8.9e-16))
        k += 1
    return zeros


@lru_cache(maxsize=None)
def phi_norms(quad_tol: float = 1e-8) -> dict:
    """Sup norm of |phi_shape| and the L1 norm of phi_shape(x)/x on [0, inf).

    The sup comes from a dense grid plus bounded golden-section refinement.
    The L1 integral is split at the sign changes of the shape function and
    truncated at X with the analytic tail (2/pi)/X; for x >= X the integrand
    is |cos x|/x^2 up to a remainder below (1+x)/x^3 in absolute value, so
    the truncation error is under ~1.5/X^2.
    """
    if not quad_tol > 0:
        raise ValueError(f"quad_tol must be positive, got {quad_tol}")
    # sup norm: the global maximum sits on the first hump; later humps decay ~1/x
    grid = np.linspace(1e-8, 30.0, 300_001)
    vals = np.abs(phi_shape(grid))
    i = int(np.argmax(vals))
    res = minimize_scalar(
        lambda x: -abs(phi_shape(x)),
        bounds=(grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]),
        method="bounded",
        options={"xatol": 1e-14},
    )
    sup_norm = max(float(-res.fun), float(vals[i]))

    x_cut = math.sqrt(3.0 / quad_tol)  # tail error ~1.5/X^2 < quad_tol/2
    zeros = phi_shape_zeros(x_cut)
    if not zeros:
        raise QuadratureFailure("no shape-function zeros found below cutoff")
    knots = np.array([0.0] + zeros)

    def integrand(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0, x, 1.0)
        core = np.abs(phi_shape(x)) / safe
        return np.where(x > 0, core, 1.0 / 3.0)

    total = 0.0
    pieces = []
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = fixed_quad(integrand, a, b, n=20)
        pieces.append(val)
    # pairwise reduction keeps the accumulated rounding benign
    total = float(np.sum(np.asarray(pieces)))
    tail = 2.0 / (PI * knots[-1])
    return {"sup_norm": sup_norm, "over_x_l1": total + tail}


@lru_cache(maxsize=None)
def c_constants(cutoff: float) -> CutoffConstants:
    """Cutoff-dependent constants C1 = 8 pi log(1 + L/2) and
    C2 = 32 pi^2 [ ||phi/x||_1 + 4 ||phi||_inf log(1 + L/2) ]^2."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    norms = phi_norms(1e-8)
    log_term = math.log1p(cutoff / 2.0)
    c1 = 8 * PI * log_term
    c2 = 32 * PI2 * (norms["over_x_l1"] + 4 * norms["sup_norm"] * log_term) ** 2
    return CutoffConstants(
        c1=c1, c2=c2, phi_sup=norms["sup_norm"], phi_over_x_l1=norms["over_x_l1"]
    )


def bracket_zero(model: ModelSpec, b0: float, b1: float) -> float:
    """Region-0 bracket: the short-distance no-binding requirement on A/alpha."""
    if not (b0 > 0 and b1 > 0):
        raise NonPositiveWidth(f"widths must be positive, got ({b0}, {b1})")
    s = b0 + b1
    pin = PI2 * s / (2.0 * b1 * b1)
    if isinstance(model, Optical):
        return 2.0 * s + pin
    if isinstance(model, Piezo):
        return (8.0 * c_constants(model.cutoff).c2) * s + pin
    if isinstance(model, Nelson):
        return model.d1 * s + (model.d2 * s) * model.alpha ** 6 + pin
    raise TypeError(f"unknown model {model!r}")


def bracket_n(model: ModelSpec, n: int, schedule: PartitionSchedule) -> float:
    """Region-n bracket for n >= 1, using widths b_{n-1}..b_{n+1} and ratio x_n."""
    if n < 1:
        raise ValueError(f"bracket_n requires n >= 1, got {n}")
    t_next = schedule.partial_sum(n + 1)
    t_prev = schedule.partial_sum(n - 1)
    b_min = min(schedule.width(n + 1), schedule.width(n))
    x = schedule.pinning_ratio(n)
    deriv = PI2 * t_next / (2.0 * b_min * b_min)
    if isinstance(model, Optical):
        return deriv + (SQRT2 * t_next / t_prev) * (
            1.0 / (1.0 - x) + SQRT2 * PI2 / (t_prev * x * x)
        )
    if isinstance(model, (Piezo, Nelson)):
        pin_radius = x * t_prev / 2.0
        gap = t_prev - 2.0 * pin_radius
        if gap <= 0:
            raise PinningViolation(
                f"pinning ball does not fit below the shell: gap {gap} at n={n}"
            )
        return (
            deriv
            + 8.0 * PI2 * t_next / gap
            + PI2 * t_next / (2.0 * pin_radius * pin_radius)
        )
    raise TypeError(f"unknown model {model!r}")


def geometric_bound(model: ModelSpec, b: float, l: float) -> float:
    """Closed-form majorant of the whole bracket family under b_i = b l^i and
    pinning radius t_{n-1}/4.  Valid for the piezo model and Nelson with d2 = 0."""
    if not b > 0:
        raise NonPositiveWidth(f"base width must be positive, got {b}")
    if not l > 1:
        raise RatioNotAboveOne(f"geometric ratio must exceed 1, got {l}")
    if isinstance(model, Piezo):
        coeff = 8.0 * c_constants(model.cutoff).c2
    elif isinstance(model, Nelson):
        if model.d2 != 0:
            raise ValueError("geometric_bound applies to Nelson only with d2 = 0")
        coeff = model.d1
    else:
        raise TypeError(f"geometric_bound is defined for piezo and Nelson models")
    first = coeff * b * (1 + l) + PI2 * (1 + l) / (2 * b * l * l)
    second = (
        PI2 * l / (2 * b * (l - 1))
        + 16 * PI2 * l ** 3 / (l - 1)
        + 8 * PI2 * l ** 3 / (b * (l - 1))
    )
    return max(first, second)
