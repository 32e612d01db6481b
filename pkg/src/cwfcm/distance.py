"""Distance metrics between points and cluster centers.

Every metric accepts an optional per-feature weight vector ``w`` in
``[0, 1]``.  Weights scale each feature's contribution *inside* the sum,
e.g. the weighted Canberra distance is

    d_w(x, v) = sum_j w_j * |x_j - v_j| / (|x_j| + |v_j|)

and for Mahalanobis the difference vector is rescaled by ``sqrt(w)``
before the quadratic form.  Canberra terms where both coordinates are
zero contribute 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRICS = ("euclidean", "cityblock", "minkowski", "canberra", "mahalanobis")


@dataclass(frozen=True, eq=False)
class DistanceSpec:
    """Metric selection plus its parameters.

    Parameters
    ----------
    kind : str
        One of :data:`METRICS`.
    minkowski_p : int
        Order of the Minkowski metric; only used when ``kind="minkowski"``.
    weights : array-like of shape (m,), optional
        Per-feature weights in ``[0, 1]``.
    mahalanobis_matrix : array-like of shape (m, m), optional
        Symmetric positive semi-definite matrix of the quadratic form.  When
        omitted, :func:`cwfcm.engine.fit` derives one from the data with
        :func:`mahalanobis_matrix_from` using ``ridge``.
    ridge : float
        Relative ridge used when the matrix is derived from data.
    """

    kind: str = "euclidean"
    minkowski_p: int = 3
    weights: np.ndarray | None = None
    mahalanobis_matrix: np.ndarray | None = None
    ridge: float = 1e-6

    def __post_init__(self):
        if self.kind not in METRICS:
            raise ValueError(f"unknown metric {self.kind!r}; expected one of {METRICS}")
        if int(self.minkowski_p) != self.minkowski_p or self.minkowski_p < 1:
            raise ValueError(f"minkowski_p must be a positive integer, got {self.minkowski_p}")
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")
        if self.weights is not None:
            w = np.array(self.weights, dtype=float)
            if w.ndim != 1 or not np.all(np.isfinite(w)):
                raise ValueError("weights must be a finite 1-D vector")
            if np.any(w < 0) or np.any(w > 1):
                raise ValueError("weights must lie in [0, 1]")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
        if self.mahalanobis_matrix is not None:
            a = np.array(self.mahalanobis_matrix, dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError("mahalanobis_matrix must be square")
            if not np.allclose(a, a.T, rtol=1e-10, atol=1e-12):
                raise ValueError("mahalanobis_matrix must be symmetric")
            scale = max(1.0, float(np.abs(a).max()))
            if np.linalg.eigvalsh(a).min() < -1e-10 * scale:
                raise ValueError("mahalanobis_matrix must be positive semi-definite")
            a.setflags(write=False)
            object.__setattr__(self, "mahalanobis_matrix", a)

    def replace(self, **changes) -> "DistanceSpec":
        fields = dict(kind=self.kind, minkowski_p=self.minkowski_p, weights=self.weights,
                      mahalanobis_matrix=self.mahalanobis_matrix, ridge=self.ridge)
        fields.update(changes)
        return DistanceSpec(**fields)


def pairwise(spec: DistanceSpec, X, V) -> np.ndarray:
    """Distances between every row of ``X`` (n, m) and every row of ``V`` (c, m).

    Returns the unsquared distance matrix of shape ``(n, c)``.  For the
    Mahalanobis metric this is the square root of the quadratic form.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    m = X.shape[1]
    if V.shape[1] != m:
        raise ValueError(f"dimension mismatch: points have {m} features, centers {V.shape[1]}")
    w = spec.weights
    if w is not None and w.shape[0] != m:
        raise ValueError(f"dimension mismatch: {w.shape[0]} weights for {m} features")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(V))):
        raise ValueError("non-finite input to distance")

    diff = X[:, None, :] - V[None, :, :]
    kind = spec.kind
    if kind == "mahalanobis":
        a = spec.mahalanobis_matrix
        if a is None:
            raise ValueError("mahalanobis metric needs a matrix; see mahalanobis_matrix_from")
        if a.shape[0] != m:
            raise ValueError(f"dimension mismatch: {a.shape[0]}x{a.shape[0]} matrix for {m} features")
        if w is not None:
            diff = diff * np.sqrt(w)
        q = np.einsum("ncj,jl,ncl->nc", diff, a, diff)
        return np.sqrt(np.maximum(q, 0.0))

    if kind == "canberra":
        num = np.abs(diff)
        den = np.abs(X)[:, None, :] + np.abs(V)[None, :, :]
        terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    elif kind == "euclidean":
        terms = diff ** 2
    elif kind == "cityblock":
        terms = np.abs(diff)
    else:
        terms = np.abs(diff) ** spec.minkowski_p

    total = terms @ w if w is not None else terms.sum(axis=-1)
    if kind == "euclidean":
        return np.sqrt(total)
    if kind == "minkowski":
        return total ** (1.0 / spec.minkowski_p)
    return total


def distance(spec: DistanceSpec, x, v) -> float:
    """Distance between two m-vectors under ``spec``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != v.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {v.shape}")
    return float(pairwise(spec, x[None, :], v[None, :])[0, 0])


def mahalanobis_matrix_from(points, ridge: float = 1e-6) -> np.ndarray:
    """Inverse of the ridge-regularised sample covariance of ``points``.

    Returns ``inv(S + lam * I)`` with ``lam = ridge * trace(S) / m``.  With
    ``ridge=0`` a rank-deficient covariance raises ``LinAlgError``.
    """
    points = getattr(points, "points", points)
    X = np.asarray(points, dtype=float)
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    m = X.shape[1]
    cov = np.atleast_2d(np.cov(X, rowvar=False, ddof=1))
    lam = ridge * np.trace(cov) / m
    reg = cov + lam * np.eye(m)
    if ridge == 0 and np.linalg.matrix_rank(reg) < m:
        raise np.linalg.LinAlgError("covariance is singular; use ridge > 0")
    inv = np.linalg.inv(reg)
    return (inv + inv.T) / 2
