"""Filter-style feature weights and the SF statistic used for initialization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEMES = ("none", "vmr", "entropy", "variance", "stddev", "mean")

ENTROPY_BINS = 10


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Fuzzified weights together with the raw per-feature statistic."""

    values: np.ndarray
    raw_stats: np.ndarray

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def _points(d):
    return np.asarray(getattr(d, "points", d), dtype=float)


def vmr(d) -> np.ndarray:
    """Variance-to-mean ratio per feature, ``s_j**2 / mean_j`` with ddof=1."""
    X = _points(d)
    mean = X.mean(axis=0)
    zero = np.flatnonzero(mean == 0)
    if zero.size:
        raise ValueError(f"feature {int(zero[0])} has zero mean; VMR is undefined "
                         "(normalize or drop the feature)")
    return X.var(axis=0, ddof=1) / mean


def fuzzify(stats) -> WeightVector:
    """Min-max map a statistic vector onto ``[0, 1]``.

    The smallest statistic gets weight 0 and the largest weight 1.  If all
    statistics are equal the mapping is undefined and every weight is 1.
    """
    s = np.asarray(stats, dtype=float).ravel()
    if s.size == 0 or not np.all(np.isfinite(s)):
        raise ValueError("statistics must be a non-empty finite vector")
    lo, hi = s.min(), s.max()
    if hi == lo:
        return WeightVector(np.ones_like(s), s)
    w = (s - lo) / (hi - lo)
    # pin the extremes; rounding can otherwise leave 1 - eps at the maximum
    w[s == lo] = 0.0
    w[s == hi] = 1.0
    return WeightVector(np.clip(w, 0.0, 1.0), s)


def _histogram_entropy(col):
    counts, _ = np.histogram(col, bins=ENTROPY_BINS)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def feature_statistic(d, scheme: str) -> np.ndarray:
    X = _points(d)
    if scheme == "vmr":
        return vmr(X)
    if scheme == "entropy":
        return np.array([_histogram_entropy(X[:, j]) for j in range(X.shape[1])])
    if scheme == "variance":
        return X.var(axis=0, ddof=1)
    if scheme == "stddev":
        return X.std(axis=0, ddof=1)
    if scheme == "mean":
        return np.abs(X.mean(axis=0))
    raise ValueError(f"unknown weight scheme {scheme!r}; expected one of {SCHEMES}")


def feature_weights(d, scheme: str = "vmr") -> WeightVector:
    """Per-feature weights for ``scheme`` (see :data:`SCHEMES`).

    ``"none"`` gives all-ones.  Entropy uses a 10-bin equal-width histogram
    of each feature (natural log).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown weight scheme {scheme!r}; expected one of {SCHEMES}")
    if scheme == "none":
        m = _points(d).shape[1]
        return WeightVector(np.ones(m), np.ones(m))
    return fuzzify(feature_statistic(d, scheme))


def sf_values(d) -> np.ndarray:
    """Per-point sum of ``sqrt(x_ij**2)``, i.e. the L1 norm of each row."""
    return np.abs(_points(d)).sum(axis=1)
