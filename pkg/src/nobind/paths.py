"""Seeded Brownian-path ensembles and discretized retarded actions.

Paths are generated with a counter-based generator keyed by (seed, path
index) so per-path generation is order-independent; all large reductions use
numpy's pairwise summation, making parallel and serial runs agree.

The double time integral over 0 <= s <= t <= T uses the trapezoid rule on
the lower triangle.  The optical kernel diverges like (t-s)^{-1/2} on the
diagonal (integrably); for self-interaction terms the diagonal cell takes
the value from the first off-diagonal node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from .bounds import ModelSpec, Optical, Piezo
from .errors import CostGuardExceeded, GridMismatch, StepGridInvalid
from .kernels import piezo_kernel_grid

COST_GUARD = 10 ** 10  # count * (T/dt)^2 kernel evaluations


@dataclass(frozen=True)
class Free:
    start: tuple[float, ...]


@dataclass(frozen=True)
class Bridge:
    pin: tuple[float, ...]  # start = end


EndpointMode = Union[Free, Bridge]


@dataclass(frozen=True)
class PathEnsemble:
    dimension: int
    horizon: float
    dt: float
    count: int
    seed: int
    endpoint_mode: EndpointMode

    def __post_init__(self):
        if self.dimension not in (3, 6):
            raise StepGridInvalid(f"dimension must be 3 or 6, got {self.dimension}")
        if not (self.horizon > 0 and self.dt > 0):
            raise StepGridInvalid("horizon and dt must be positive")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) < 1:
            raise StepGridInvalid(
                f"horizon/dt must be a positive integer, got {steps}"
            )
        if self.count < 1:
            raise StepGridInvalid(f"count must be positive, got {self.count}")
        point = (
            self.endpoint_mode.start
            if isinstance(self.endpoint_mode, Free)
            else self.endpoint_mode.pin
        )
        if len(point) != self.dimension:
            raise StepGridInvalid(
                f"endpoint has dimension {len(point)}, ensemble {self.dimension}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


def sample_paths(ensemble: PathEnsemble) -> np.ndarray:
    """Array of shape (count, n_steps + 1, dimension); deterministic given the seed."""
    n = ensemble.n_steps
    dim = ensemble.dimension
    sqrt_dt = math.sqrt(ensemble.dt)
    out = np.empty((ensemble.count, n + 1, dim))
    bridge = isinstance(ensemble.endpoint_mode, Bridge)
    point = np.asarray(
        ensemble.endpoint_mode.pin if bridge else ensemble.endpoint_mode.start,
        dtype=float,
    )
    frac = (np.arange(n + 1) / n)[:, None]
    for i in range(ensemble.count):
        key = np.array([ensemble.seed, i], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        incs = rng.standard_normal((n, dim)) * sqrt_dt
        w = np.vstack([np.zeros((1, dim)), np.cumsum(incs, axis=0)])
        if bridge:
            out[i] = point + w - frac * w[-1]
        else:
            out[i] = point + w
    return out


@lru_cache(maxsize=8)
def _triangle_weights(n: int, dt: float) -> np.ndarray:
    """Trapezoid weights W[i, j] for int_0^T dt int_0^t ds on an (n+1)^2 grid,
    supported on the lower triangle j <= i."""
    w_outer = np.full(n + 1, dt)
    w_outer[0] = w_outer[-1] = dt / 2
    weights = np.zeros((n + 1, n + 1))
    for i in range(1, n + 1):
        inner = np.zeros(n + 1)
        inner[: i + 1] = dt
        inner[0] = inner[i] = dt / 2
        weights[i] = w_outer[i] * inner
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=8)
def _lag_matrix(n: int, dt: float) -> np.ndarray:
    idx = np.arange(n + 1)
    lags = np.abs(np.subtract.outer(idx, idx)) * dt
    lags.setflags(write=False)
    return lags


@lru_cache(maxsize=8)
def _optical_decay(n: int, dt: float) -> np.ndarray:
    decay = np.exp(-_lag_matrix(n, dt))
    decay.setflags(write=False)
    return decay


def _kernel_matrix(model: ModelSpec, xa: np.ndarray, xb: np.ndarray,
                   dt: float, self_term: bool) -> np.ndarray:
    """K[i, j] = kernel(|xa_i - xb_j|, t_i - t_j) on the lower triangle.

    For self terms the diagonal takes the first off-diagonal value (optical)
    or the finite coincidence limit (piezo).
    """
    n = xa.shape[0] - 1
    dist = cdist(xa, xb)
    lags = _lag_matrix(n, dt)
    if isinstance(model, Optical):
        decay = _optical_decay(n, dt)
        if self_term:
            idx = np.arange(1, n + 1)
            np.fill_diagonal(dist, 1.0)
            k = decay / dist
            k[idx, idx] = k[idx, idx - 1]
            k[0, 0] = k[1, 0] if n >= 1 else 0.0
        else:
            with np.errstate(divide="ignore"):
                k = decay / dist
        return k
    if isinstance(model, Piezo):
        if self_term:
            np.fill_diagonal(dist, 0.0)
        return piezo_kernel_grid(dist, lags, model.cutoff)
    raise TypeError(f"retarded action defined for optical and piezo models")


def _coupling(model: ModelSpec, alpha: float) -> float:
    if isinstance(model, Optical):
        return alpha / math.sqrt(2.0)
    return alpha


def _term(model: ModelSpec, xa, xb, dt, alpha, self_term) -> float:
    k = _kernel_matrix(model, xa, xb, dt, self_term)
    w = _triangle_weights(xa.shape[0] - 1, dt)
    # a coincidence (infinite kernel) at a zero-weight node contributes nothing
    k = np.where(w > 0.0, k, 0.0)
    return _coupling(model, alpha) * float(np.sum(w * k))


def self_action(model: ModelSpec, path: np.ndarray, alpha: float, dt: float) -> float:
    """Discretized retarded self-interaction of one path."""
    if alpha == 0:
        return 0.0
    return _term(model, path, path, dt, alpha, self_term=True)


def cross_action(model: ModelSpec, path_a: np.ndarray, path_b: np.ndarray,
                 alpha: float, dt: float) -> float:
    """One ordered cross term: the triangle integral of
    kernel(|path_a(t) - path_b(s)|, t - s) over 0 <= s <= t <= T."""
    if path_a.shape != path_b.shape:
        raise GridMismatch(
            f"paths must share the grid: {path_a.shape} vs {path_b.shape}"
        )
    if alpha == 0:
        return 0.0
    return _term(model, path_a, path_b, dt, alpha, self_term=False)


def retarded_action(model: ModelSpec, paths, alpha: float, dt: float) -> float:
    """Full discretized action of a single path (self term) or a pair
    (both self terms plus both ordered cross terms)."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if isinstance(paths, (tuple, list)):
        a, b = paths
        if a.shape != b.shape:
            raise GridMismatch(f"paths must share the grid: {a.shape} vs {b.shape}")
        return (
            self_action(model, a, alpha, dt)
            + self_action(model, b, alpha, dt)
            + cross_action(model, a, b, alpha, dt)
            + cross_action(model, b, a, alpha, dt)
        )
    return self_action(model, paths, alpha, dt)


def expected_optical_self_action(T: float, dt: float, alpha: float) -> float:
    """Exact expectation of the discretized optical self-action over Brownian
    paths, via E|X_t - X_s|^{-1} = sqrt(2/pi) (t - s)^{-1/2}, applied with the
    same trapezoid weights and diagonal rule as the estimator."""
    n = int(round(T / dt))
    lag = np.abs(np.subtract.outer(np.arange(n + 1), np.arange(n + 1))) * dt
    lag_eff = lag.copy()
    np.fill_diagonal(lag_eff, dt)  # diagonal uses the first off-diagonal node
    g = np.exp(-lag_eff) * math.sqrt(2 / math.pi) / np.sqrt(lag_eff)
    w = _triangle_weights(n, dt)
    return (alpha / math.sqrt(2.0)) * float(np.sum(w * g))


def continuum_optical_self_action(T: float, alpha: float) -> float:
    """Continuum limit of the expected optical self-action:
    (alpha/sqrt 2) sqrt(2/pi) int_0^T int_0^t e^{-u} u^{-1/2} du dt."""
    from scipy.integrate import quad

    inner = lambda t: math.sqrt(math.pi) * math.erf(math.sqrt(t))
    val, _ = quad(inner, 0.0, T, epsabs=1e-12, epsrel=1e-12, limit=200)
    return (alpha / math.sqrt(2.0)) * math.sqrt(2 / math.pi) * val


def mc_energy_probe(model: ModelSpec, alpha: float, ensemble: PathEnsemble) -> dict:
    """Sample statistics of the discretized action over an ensemble.

    Returns action mean, its standard error and the max-stabilized
    log-mean-exp.  (1/T) * action_mean is at most (1/T) * log_mean_exp by
    Jensen on the sample; neither is asserted as an energy.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    steps = ensemble.n_steps
    if ensemble.count * steps ** 2 > COST_GUARD:
        raise CostGuardExceeded(
            f"count * (T/dt)^2 = {ensemble.count * steps ** 2} exceeds {COST_GUARD}"
        )
    if alpha == 0:
        return {"action_mean": 0.0, "action_stderr": 0.0, "log_mean_exp": 0.0}
    paths = sample_paths(ensemble)
    actions = np.empty(ensemble.count)
    for i in range(ensemble.count):
        if ensemble.dimension == 6:
            pair = (paths[i, :, :3], paths[i, :, 3:])
            actions[i] = retarded_action(model, pair, alpha, ensemble.dt)
        else:
            actions[i] = self_action(model, paths[i], alpha, ensemble.dt)
    mean = float(np.mean(actions))
    stderr = float(np.std(actions, ddof=1) / math.sqrt(ensemble.count)) if ensemble.count > 1 else 0.0
    shift = float(np.max(actions))
    log_mean_exp = shift + float(np.log(np.mean(np.exp(actions - shift))))
    return {"action_mean": mean, "action_stderr": stderr, "log_mean_exp": log_mean_exp}
