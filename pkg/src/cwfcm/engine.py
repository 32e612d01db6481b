"""Fuzzy c-means by alternating optimization.

Each iteration updates the centers from the current memberships, evaluates
point-to-center dissimilarities, records the objective and then updates the
memberships.  The loop stops once the objective changes by less than
``epsilon`` or after ``max_iter`` iterations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .dataset import Dataset
from .distance import DistanceSpec, mahalanobis_matrix_from, pairwise
from .weighting import SCHEMES, feature_weights, sf_values

INITS = ("random", "sf")

# floor for the triangular SF kernel so that every cluster starts non-empty
SF_KERNEL_FLOOR = 1e-6


class EmptyClusterError(RuntimeError):
    """A cluster's total fuzzy weight dropped to zero."""


class NonFiniteObjectiveError(FloatingPointError):
    """The objective became NaN or infinite."""


@dataclass(frozen=True)
class FcmConfig:
    """Run parameters for :func:`fit`.

    ``square_distance`` controls what enters the objective and membership
    update: ``True`` uses ``d**2`` (the classic formulation), ``False``
    uses the metric value ``d`` itself as the dissimilarity.
    """

    c: int
    fuzziness: float = 2.0
    epsilon: float = 1e-5
    max_iter: int = 100
    init: str = "random"
    seed: int = 0
    distance: DistanceSpec = field(default_factory=DistanceSpec)
    weight_scheme: str = "none"
    normalize: bool = False
    square_distance: bool = True

    def __post_init__(self):
        if self.c < 2:
            raise ValueError(f"need at least 2 clusters, got {self.c}")
        if not self.fuzziness > 1:
            raise ValueError(f"fuzziness must exceed 1, got {self.fuzziness}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.init not in INITS:
            raise ValueError(f"unknown init {self.init!r}; expected one of {INITS}")
        if self.weight_scheme not in SCHEMES:
            raise ValueError(f"unknown weight scheme {self.weight_scheme!r}")

    @property
    def deterministic(self) -> bool:
        return self.init == "sf"

    def replace(self, **changes) -> "FcmConfig":
        return replace(self, **changes)


PRESETS = {
    "fcm": dict(distance="euclidean", weight_scheme="none", init="random"),
    "cwfcm": dict(distance="canberra", weight_scheme="vmr", init="sf", square_distance=False),
}


def preset(name: str, c: int, **overrides) -> FcmConfig:
    """Build a named configuration.

    ``fcm`` is the classic Euclidean, unweighted, randomly initialised
    algorithm.  ``cwfcm`` uses VMR-weighted Canberra dissimilarity with SF
    initialization.  Keyword overrides win over preset values; a
    ``distance`` override may be a metric name or a :class:`DistanceSpec`.
    """
    try:
        params = dict(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    params.update(overrides)
    dist = params.pop("distance")
    minkowski_p = params.pop("minkowski_p", None)
    if isinstance(dist, str):
        dist = DistanceSpec(dist)
    if minkowski_p is not None:
        dist = dist.replace(minkowski_p=int(minkowski_p))
    return FcmConfig(c=c, distance=dist, **params)


@dataclass(eq=False)
class RunResult:
    partition: np.ndarray
    centers: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    wall_time: float
    crisp_labels: np.ndarray
    weights: np.ndarray
    converged: bool

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def check_partition(mu, atol=1e-9):
    """Raise ``ValueError`` unless ``mu`` is row-stochastic with entries in [0, 1]."""
    mu = np.asarray(mu)
    if mu.ndim != 2:
        raise ValueError("partition must be a 2-D array")
    if np.any(mu < -atol) or np.any(mu > 1 + atol):
        raise ValueError("partition entries must lie in [0, 1]")
    if not np.allclose(mu.sum(axis=1), 1.0, rtol=0, atol=atol):
        raise ValueError("partition rows must sum to 1")


def init_random(n: int, c: int, seed: int = 0) -> np.ndarray:
    """Uniform random memberships, each row normalized to sum to 1."""
    if not n >= c >= 2:
        raise ValueError(f"need n >= c >= 2, got n={n}, c={c}")
    mu = np.random.default_rng(seed).random((n, c))
    return mu / mu.sum(axis=1, keepdims=True)


def init_sf(d, c: int) -> np.ndarray:
    """Deterministic memberships from the per-point SF value.

    SF is min-max scaled to ``f`` in ``[0, 1]``; membership in cluster ``k``
    (0-based) is a triangular kernel of half-width ``1/c`` centred at
    ``(k + 0.5)/c``, floored at :data:`SF_KERNEL_FLOOR` and row-normalized.
    Points with the smallest SF therefore start in the first cluster and
    those with the largest SF in the last.
    """
    sf = sf_values(d)
    n = sf.shape[0]
    if not n >= c >= 2:
        raise ValueError(f"need n >= c >= 2, got n={n}, c={c}")
    lo, hi = sf.min(), sf.max()
    if hi == lo:
        raise ValueError("all SF values are equal; SF initialization is undefined")
    f = (sf - lo) / (hi - lo)
    mid = (np.arange(c) + 0.5) / c
    mu = np.maximum(1.0 - np.abs(f[:, None] - mid[None, :]) * c, SF_KERNEL_FLOOR)
    return mu / mu.sum(axis=1, keepdims=True)


def update_centers(d, mu, fuzziness: float = 2.0) -> np.ndarray:
    """Fuzzy-weighted means ``v_k = sum_i mu_ik**z x_i / sum_i mu_ik**z``."""
    X = np.asarray(getattr(d, "points", d), dtype=float)
    um = np.asarray(mu, dtype=float) ** fuzziness
    mass = um.sum(axis=0)
    empty = np.flatnonzero(mass <= 0)
    if empty.size:
        raise EmptyClusterError(f"cluster {int(empty[0])} has zero total membership")
    return (um.T @ X) / mass[:, None]


def update_memberships(distances_sq, fuzziness: float = 2.0) -> np.ndarray:
    """Memberships proportional to ``d_ik**(-2/(z-1))``.

    ``distances_sq`` holds the dissimilarity entering the objective.  A
    point that coincides with one or more centers is shared equally among
    those centers and gets zero membership elsewhere.
    """
    D = np.asarray(distances_sq, dtype=float)
    zero = D <= 0
    hit = zero.any(axis=1)
    mu = np.empty_like(D)
    if np.any(~hit):
        rows = D[~hit]
        # dividing by the row minimum first keeps the powers in range
        inv = (rows / rows.min(axis=1, keepdims=True)) ** (-1.0 / (fuzziness - 1.0))
        mu[~hit] = inv / inv.sum(axis=1, keepdims=True)
    if np.any(hit):
        z = zero[hit].astype(float)
        mu[hit] = z / z.sum(axis=1, keepdims=True)
    return mu


def objective(mu, distances_sq, fuzziness: float = 2.0) -> float:
    """``sum_i sum_k mu_ik**z * D_ik``."""
    mu = np.asarray(mu, dtype=float)
    D = np.asarray(distances_sq, dtype=float)
    if mu.shape != D.shape:
        raise ValueError(f"shape mismatch: {mu.shape} vs {D.shape}")
    return float(np.sum(mu ** fuzziness * D))


def min_max_normalize(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    return np.divide(X - lo, span, out=np.zeros_like(X), where=span > 0)


def resolve_distance(cfg: FcmConfig, X) -> DistanceSpec:
    """Attach weights and, for Mahalanobis, a data-derived matrix to the metric."""
    spec = cfg.distance
    w = feature_weights(X, cfg.weight_scheme).values
    changes = {}
    if cfg.weight_scheme != "none":
        changes["weights"] = w
    if spec.kind == "mahalanobis" and spec.mahalanobis_matrix is None:
        changes["mahalanobis_matrix"] = mahalanobis_matrix_from(X, spec.ridge)
    return spec.replace(**changes) if changes else spec


Callback = Callable[[int, np.ndarray, np.ndarray, float], None]


def fit(d: Dataset, cfg: FcmConfig, callback: Callback | None = None) -> RunResult:
    """Cluster ``d`` with the fuzzy c-means loop configured by ``cfg``.

    Feature weights are computed once from the (optionally normalized) data
    before the loop starts.  ``callback(t, mu, centers, P)`` is invoked after
    every iteration with the updated memberships.

    Raises
    ------
    EmptyClusterError
        A cluster lost all of its fuzzy weight.
    NonFiniteObjectiveError
        The objective became NaN or infinite.
    """
    X = np.asarray(getattr(d, "points", d), dtype=float)
    n = X.shape[0]
    if cfg.c > n:
        raise ValueError(f"cannot form {cfg.c} clusters from {n} points")
    if cfg.normalize:
        X = min_max_normalize(X)

    start = time.perf_counter()
    spec = resolve_distance(cfg, X)
    mu = init_sf(X, cfg.c) if cfg.init == "sf" else init_random(n, cfg.c, cfg.seed)

    trace = []
    converged = False
    for t in range(1, cfg.max_iter + 1):
        centers = update_centers(X, mu, cfg.fuzziness)
        dist = pairwise(spec, X, centers)
        D = dist ** 2 if cfg.square_distance else dist
        P = objective(mu, D, cfg.fuzziness)
        if not np.isfinite(P):
            raise NonFiniteObjectiveError(f"objective is {P} at iteration {t}")
        mu = update_memberships(D, cfg.fuzziness)
        trace.append(P)
        if callback is not None:
            callback(t, mu, centers, P)
        if t > 1 and abs(P - trace[-2]) < cfg.epsilon:
            converged = True
            break
    wall = time.perf_counter() - start

    weights = spec.weights if spec.weights is not None else np.ones(X.shape[1])
    return RunResult(
        partition=mu,
        centers=centers,
        objective_trace=np.array(trace),
        iterations=len(trace),
        wall_time=wall,
        crisp_labels=mu.argmax(axis=1),
        weights=np.array(weights),
        converged=converged,
    )
