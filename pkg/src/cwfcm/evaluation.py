"""External validation of a crisp clustering against ground-truth classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class EvaluationReport:
    rand_index: float
    purity: float
    accuracy_rate: float
    error_rate: float
    misclassified: int
    mapping: dict

    def as_dict(self):
        return {
            "rand_index": self.rand_index,
            "purity": self.purity,
            "accuracy_rate": self.accuracy_rate,
            "error_rate": self.error_rate,
            "misclassified": self.misclassified,
        }


def contingency(predicted, actual):
    """Count matrix ``C[i, j]`` of points in cluster ``i`` and class ``j``.

    Returns the matrix together with the cluster and class values indexing
    its rows and columns.
    """
    predicted = np.asarray(predicted).ravel()
    actual = np.asarray(actual).ravel()
    if predicted.shape != actual.shape:
        raise ValueError(f"length mismatch: {predicted.size} predicted vs {actual.size} actual")
    clusters, p = np.unique(predicted, return_inverse=True)
    classes, a = np.unique(actual, return_inverse=True)
    table = np.zeros((clusters.size, classes.size), dtype=np.int64)
    np.add.at(table, (p, a), 1)
    return table, clusters, classes


def _pairs(counts):
    counts = np.asarray(counts, dtype=np.int64)
    return int((counts * (counts - 1) // 2).sum())


def rand_index(predicted, actual) -> float:
    """Fraction of point pairs on which the two partitions agree.

    A pair agrees when it is grouped together in both partitions or
    separated in both.
    """
    table, _, _ = contingency(predicted, actual)
    n = int(table.sum())
    if n < 2:
        raise ValueError("rand index needs at least 2 points")
    total = n * (n - 1) // 2
    both = _pairs(table)
    same_pred = _pairs(table.sum(axis=1))
    same_true = _pairs(table.sum(axis=0))
    apart = total - same_pred - same_true + both
    return (both + apart) / total


def purity(predicted, actual) -> float:
    """Share of points belonging to the majority class of their cluster."""
    table, _, _ = contingency(predicted, actual)
    return int(table.max(axis=1).sum()) / int(table.sum())


def accuracy(predicted, actual):
    """Best one-to-one cluster-to-class matching.

    Returns ``(accuracy_rate, error_rate, misclassified, mapping)`` with the
    rates in percent.  Clusters left without a class (more clusters than
    classes) map to ``None`` and all their points count as errors.
    """
    table, clusters, classes = contingency(predicted, actual)
    n = int(table.sum())
    rows, cols = linear_sum_assignment(table, maximize=True)
    correct = int(table[rows, cols].sum())
    mapping = {c.item(): None for c in clusters}
    mapping.update({clusters[r].item(): classes[k].item() for r, k in zip(rows, cols)})
    return 100.0 * correct / n, 100.0 * (n - correct) / n, n - correct, mapping


def evaluate(predicted, actual) -> EvaluationReport:
    ar, er, mc, mapping = accuracy(predicted, actual)
    return EvaluationReport(
        rand_index=rand_index(predicted, actual),
        purity=purity(predicted, actual),
        accuracy_rate=ar,
        error_rate=er,
        misclassified=mc,
        mapping=mapping,
    )
