"""Friedman omnibus test and Nemenyi pairwise post-hoc comparison.

Methods are ranked within each dataset (rank 1 = best, ties share the
average rank).  The Nemenyi p-value for a pair of methods is the upper tail
of the studentized range distribution with ``k`` groups and infinite
degrees of freedom, evaluated at ``|Rbar_i - Rbar_j| / sqrt(k(k+1)/(12N))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special
from scipy.stats import chi2, rankdata


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Scores of ``k`` methods (columns) on ``N`` datasets (rows)."""

    scores: np.ndarray
    dataset_names: tuple = ()
    method_names: tuple = ()
    lower_is_better: bool = True

    def __post_init__(self):
        s = np.array(self.scores, dtype=float)
        if s.ndim != 2:
            raise ValueError("scores must be a 2-D matrix")
        N, k = s.shape
        if N < 2 or k < 2:
            raise ValueError(f"need at least 2 datasets and 2 methods, got {N}x{k}")
        if not np.all(np.isfinite(s)):
            raise ValueError("scores must be finite")
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "dataset_names",
                           tuple(self.dataset_names) or tuple(f"d{i}" for i in range(N)))
        object.__setattr__(self, "method_names",
                           tuple(self.method_names) or tuple(f"m{j}" for j in range(k)))

    def ranks(self) -> np.ndarray:
        s = self.scores if self.lower_is_better else -self.scores
        return rankdata(s, method="average", axis=1)


@dataclass(frozen=True, eq=False)
class FriedmanResult:
    q_statistic: float
    degrees_of_freedom: int
    p_value: float
    rank_sums: np.ndarray
    critical_value: float
    alpha: float = 0.05
    mean_ranks: np.ndarray = field(default=None)

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha


def friedman(m: ScoreMatrix, alpha: float = 0.05) -> FriedmanResult:
    """Friedman chi-square statistic with the usual correction for ties."""
    ranks = m.ranks()
    N, k = ranks.shape
    R = ranks.sum(axis=0)
    q = 12.0 / (N * k * (k + 1)) * np.sum(R ** 2) - 3.0 * N * (k + 1)
    ties = 0.0
    for row in ranks:
        _, t = np.unique(row, return_counts=True)
        ties += np.sum(t ** 3 - t)
    correction = 1.0 - ties / (N * (k ** 3 - k))
    q = 0.0 if correction <= 0 else max(q / correction, 0.0)
    df = k - 1
    return FriedmanResult(
        q_statistic=float(q),
        degrees_of_freedom=df,
        p_value=float(np.clip(chi2.sf(q, df), 0.0, 1.0)),
        rank_sums=R,
        critical_value=float(chi2.isf(alpha, df)),
        alpha=alpha,
        mean_ranks=R / N,
    )


_SQRT2 = np.sqrt(2.0)


def _norm_cdf(x):
    return 0.5 * special.erfc(-x / _SQRT2)


@lru_cache(maxsize=4096)
def _range_cdf(q, k):
    # P(range of k iid N(0,1) <= q) = k * int phi(z) [Phi(z) - Phi(z - q)]^(k-1) dz
    def integrand(z):
        return np.exp(-0.5 * z * z) * (_norm_cdf(z) - _norm_cdf(z - q)) ** (k - 1)

    val, _ = integrate.quad(integrand, -12.0, 12.0 + q, points=[q / 2.0],
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return k * val / np.sqrt(2.0 * np.pi)


def studentized_range_sf(q: float, k: int) -> float:
    """Upper tail ``P(Q > q)`` of the studentized range, ``k`` groups, df = inf."""
    if k < 2:
        raise ValueError("need at least 2 groups")
    if q <= 0:
        return 1.0
    return float(np.clip(1.0 - _range_cdf(float(q), int(k)), 0.0, 1.0))


def nemenyi(m: ScoreMatrix) -> np.ndarray:
    """Symmetric ``k x k`` matrix of Nemenyi p-values with a unit diagonal."""
    ranks = m.ranks()
    N, k = ranks.shape
    mean = ranks.mean(axis=0)
    se = np.sqrt(k * (k + 1) / (6.0 * N))
    p = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            z = abs(mean[i] - mean[j]) / se
            p[i, j] = p[j, i] = studentized_range_sf(z * _SQRT2, k)
    return p
