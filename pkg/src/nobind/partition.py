"""Interparticle-distance partition of unity and single-particle pinning profile.

The partition covers [0, infinity) with a half-pill followed by asymmetric
sine/cosine bumps; squares sum to 1 with at most two bumps active at any
point.  A closed-form tail rule extends a finite list of stored widths to
every index, so no infinite storage is needed.

All functions here are pure; schedule objects are immutable and freely
shareable across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from scipy.integrate import quad

from .errors import (
    NonPositiveRadius,
    NonPositiveWidth,
    QuadratureFailure,
    RatioOutOfRange,
    TruncationTooShort,
)

RATIO_EPS = 1e-9


@dataclass(frozen=True)
class LinearTail:
    """Beyond the stored widths: width(n) = (n - 1) * b2, constant pinning ratio."""

    b2: float
    x: float


@dataclass(frozen=True)
class GeometricTail:
    """Beyond the stored widths: width(n) = b * l**n, pinning ratio 1/2."""

    b: float
    l: float


TailRule = Union[LinearTail, GeometricTail]


@dataclass(frozen=True)
class PartitionSchedule:
    """Widths b0..bN with cached partial sums, pinning ratios x1..xN and a tail rule."""

    widths: tuple[float, ...]
    pinning_ratios: tuple[float, ...]
    tail: TailRule
    partial_sums: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.partial_sums:
            sums = []
            acc = 0.0
            for w in self.widths:
                acc += w
                sums.append(acc)
            object.__setattr__(self, "partial_sums", tuple(sums))

    @property
    def truncation(self) -> int:
        return len(self.widths) - 1

    def width(self, n: int) -> float:
        if n < 0:
            raise IndexError(f"width index {n} < 0")
        if n <= self.truncation:
            return self.widths[n]
        if isinstance(self.tail, LinearTail):
            return (n - 1) * self.tail.b2
        return self.tail.b * self.tail.l ** n

    def partial_sum(self, n: int) -> float:
        if n < 0:
            raise IndexError(f"partial sum index {n} < 0")
        N = self.truncation
        if n <= N:
            return self.partial_sums[n]
        tN = self.partial_sums[N]
        if isinstance(self.tail, LinearTail):
            # sum_{i=N+1}^{n} (i-1) = (n-1+N)(n-N)/2
            return tN + self.tail.b2 * (n - 1 + N) * (n - N) / 2
        l = self.tail.l
        return tN + self.tail.b * l ** (N + 1) * (l ** (n - N) - 1) / (l - 1)

    def pinning_ratio(self, n: int) -> float:
        if n < 1:
            raise IndexError(f"pinning ratio index {n} < 1")
        if n <= self.truncation:
            return self.pinning_ratios[n - 1]
        if isinstance(self.tail, LinearTail):
            return self.tail.x
        return 0.5

    def scaled(self, lam: float) -> "PartitionSchedule":
        """All widths multiplied by lam > 0 (tail parameters included)."""
        if lam <= 0:
            raise NonPositiveWidth(f"scale factor must be positive, got {lam}")
        if isinstance(self.tail, LinearTail):
            tail: TailRule = LinearTail(self.tail.b2 * lam, self.tail.x)
        else:
            tail = GeometricTail(self.tail.b * lam, self.tail.l)
        return PartitionSchedule(
            tuple(w * lam for w in self.widths), self.pinning_ratios, tail
        )


def make_schedule(
    widths, pinning_ratios, tail_rule: TailRule
) -> PartitionSchedule:
    """Validate and build a PartitionSchedule.

    Requires N >= 2 stored widths past the first, all widths positive and all
    pinning ratios strictly inside (0, 1); the ratio bound enforces
    2*L_n < t_{n-1}.
    """
    widths = tuple(float(w) for w in widths)
    ratios = tuple(float(x) for x in pinning_ratios)
    if len(widths) < 3:
        raise TruncationTooShort(
            f"need at least 3 widths (N >= 2), got {len(widths)}"
        )
    for w in widths:
        if not (w > 0) or not math.isfinite(w):
            raise NonPositiveWidth(f"width {w} is not strictly positive")
    if len(ratios) != len(widths) - 1:
        raise RatioOutOfRange(
            f"expected {len(widths) - 1} pinning ratios, got {len(ratios)}"
        )
    for x in ratios:
        if not (RATIO_EPS < x < 1 - RATIO_EPS):
            raise RatioOutOfRange(f"pinning ratio {x} outside ({RATIO_EPS}, {1 - RATIO_EPS})")
    if isinstance(tail_rule, LinearTail):
        if not tail_rule.b2 > 0:
            raise NonPositiveWidth(f"tail width {tail_rule.b2} is not strictly positive")
        if not (RATIO_EPS < tail_rule.x < 1 - RATIO_EPS):
            raise RatioOutOfRange(f"tail pinning ratio {tail_rule.x} out of range")
    elif isinstance(tail_rule, GeometricTail):
        if not tail_rule.b > 0:
            raise NonPositiveWidth(f"tail base {tail_rule.b} is not strictly positive")
        if not tail_rule.l > 1:
            raise RatioOutOfRange(f"geometric tail ratio {tail_rule.l} must exceed 1")
    else:
        raise TypeError(f"unknown tail rule {tail_rule!r}")
    return PartitionSchedule(widths, ratios, tail_rule)


def phi_eval(n: int, t: float, schedule: PartitionSchedule) -> float:
    """Value of the n-th partition bump at radius t >= 0.

    Bump 0 is flat at 1 on [0, a0] and decays as a cosine over [a0, a0+a1];
    bump n >= 1 rises as a sine over [s_{n-1}, s_n] and decays as a cosine
    over [s_n, s_{n+1}].  Zero outside those intervals.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")
    if n == 0:
        a0 = schedule.width(0)
        a1 = schedule.width(1)
        if t <= a0:
            return 1.0
        if t <= a0 + a1:
            return math.cos(math.pi * (t - a0) / (2 * a1))
        return 0.0
    s_lo = schedule.partial_sum(n - 1)
    s_mid = schedule.partial_sum(n)
    if s_lo <= t <= s_mid:
        return math.sin(math.pi * (t - s_lo) / (2 * schedule.width(n)))
    s_hi = schedule.partial_sum(n + 1)
    if s_mid <= t <= s_hi:
        return math.cos(math.pi * (t - s_mid) / (2 * schedule.width(n + 1)))
    return 0.0


def active_indices(t: float, schedule: PartitionSchedule) -> tuple[int, ...]:
    """Indices with a potentially nonzero bump at t (at most two, consecutive)."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t < schedule.width(0):
        return (0,)
    m = 0
    while schedule.partial_sum(m) < t:
        m += 1
    # s_{m-1} <= t <= s_m: active bumps are m-1 (cos side) and m (sin side)
    if m == 0:
        return (0,)
    return (m - 1, m)


def grad_sq_sum(t: float, schedule: PartitionSchedule) -> float:
    """Sum over n of |phi_n'(t)|^2.

    On the open interval (s_{m-1}, s_m) the two active derivatives collapse
    to the constant pi^2 / (4 a_m^2); at a knot the larger one-sided value is
    reported (the bounds only ever use the sup, so this is conservative).
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    a0 = schedule.partial_sum(0)
    if t < a0:
        return 0.0
    m = 0
    while schedule.partial_sum(m) < t:
        m += 1
    # now s_{m-1} <= t <= s_m with s_{-1} interpreted as the plateau edge a0
    pi2 = math.pi ** 2
    if t == schedule.partial_sum(m):
        right = pi2 / (4 * schedule.width(m + 1) ** 2)
        left = 0.0 if m == 0 else pi2 / (4 * schedule.width(m) ** 2)
        return max(left, right)
    return pi2 / (4 * schedule.width(m) ** 2)


def pinning_profile(r: float, R: float) -> float:
    """Dirichlet ground-state profile of the ball of radius R, evaluated at radius r.

    sin(pi r / R) / (sqrt(2 pi R) r) inside, 0 at and beyond the boundary.
    A 3-term series is used below r < 1e-6 R to avoid cancellation.
    """
    if not R > 0:
        raise NonPositiveRadius(f"radius must be positive, got {R}")
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if r >= R:
        return 0.0
    norm = math.sqrt(2 * math.pi * R)
    z = math.pi * r / R
    if r < 1e-6 * R:
        return (math.pi / R) * (1 - z * z / 6 + z ** 4 / 120) / norm
    return math.sin(z) / (norm * r)


def pinning_profile_grad(r: float, R: float) -> float:
    """Radial derivative of the pinning profile (analytic, not differenced)."""
    if not R > 0:
        raise NonPositiveRadius(f"radius must be positive, got {R}")
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if r >= R:
        return 0.0
    norm = math.sqrt(2 * math.pi * R)
    z = math.pi * r / R
    # d/dr [sin(z)/r] = (pi/R)^2 * (z cos z - sin z)/z^2
    if z < 1e-2:
        shape = -(z / 3 - z ** 3 / 30 + z ** 5 / 840)
    else:
        shape = (z * math.cos(z) - math.sin(z)) / (z * z)
    return (math.pi / R) ** 2 * shape / norm


def pinning_diagnostics(R: float, quad_tol: float = 1e-10) -> dict:
    """Radial quadrature of the profile's L2 norm and localization error.

    Returns {"l2_norm": 4 pi int f^2 r^2 dr,
             "localization_error": (1/2) 4 pi int |f'|^2 r^2 dr}.
    The localization error equals pi^2/(2 R^2) exactly.
    """
    if not R > 0:
        raise NonPositiveRadius(f"radius must be positive, got {R}")
    if not quad_tol > 0:
        raise ValueError(f"quad_tol must be positive, got {quad_tol}")

    def f2(r):
        v = pinning_profile(r, R)
        return 4 * math.pi * v * v * r * r

    def g2(r):
        v = pinning_profile_grad(r, R)
        return 2 * math.pi * v * v * r * r

    l2, err_l2 = quad(f2, 0.0, R, epsabs=quad_tol, epsrel=quad_tol, limit=200)
    loc, err_loc = quad(g2, 0.0, R, epsabs=quad_tol, epsrel=quad_tol, limit=200)
    if err_l2 > 10 * quad_tol * max(1.0, abs(l2)):
        raise QuadratureFailure(f"l2 quadrature error {err_l2} exceeds tolerance")
    if err_loc > 10 * quad_tol * max(1.0, abs(loc)):
        raise QuadratureFailure(f"gradient quadrature error {err_loc} exceeds tolerance")
    return {"l2_norm": l2, "localization_error": loc}
