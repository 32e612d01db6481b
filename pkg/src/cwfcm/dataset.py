"""Labeled numeric datasets: delimited-text I/O and attribute noise."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised when a data file or array cannot form a valid dataset."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer class labels.

    ``points`` is ``(n, m)``; ``labels`` holds codes ``0..K-1`` indexing
    ``class_names``.  Arrays are stored read-only so instances can be
    shared freely between threads and worker processes.
    """

    points: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()
    name: str = field(default="", compare=False)
    label_name: str = field(default="class", compare=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        labels = np.array(self.labels)
        if points.ndim != 2:
            raise DatasetError(f"points must be 2-D, got shape {points.shape}")
        n, m = points.shape
        if n < 2:
            raise DatasetError(f"need at least 2 rows, got {n}")
        if m < 1:
            raise DatasetError("need at least 1 feature")
        if not np.all(np.isfinite(points)):
            i, j = np.argwhere(~np.isfinite(points))[0]
            raise DatasetError(f"non-finite value at row {i}, column {j}")
        if labels.shape != (n,):
            raise DatasetError(f"labels must have shape ({n},), got {labels.shape}")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.mod(labels, 1) == 0):
                raise DatasetError("labels must be integer class codes")
        labels = labels.astype(np.int64)
        if labels.min() < 0:
            raise DatasetError("labels must be non-negative")

        feature_names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(m))
        if len(feature_names) != m:
            raise DatasetError(f"{len(feature_names)} feature names for {m} columns")
        n_classes = int(labels.max()) + 1
        class_names = tuple(self.class_names) or tuple(str(k) for k in range(n_classes))
        if len(class_names) < n_classes:
            raise DatasetError(
                f"label {n_classes - 1} has no entry in class_names ({len(class_names)} given)")

        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", feature_names)
        object.__setattr__(self, "class_names", class_names)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def with_points(self, points: np.ndarray) -> "Dataset":
        """Copy with the feature matrix replaced; labels and names are kept."""
        return Dataset(points, self.labels, self.feature_names, self.class_names,
                       self.name, self.label_name)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive attribute noise, ``level`` percent of each feature's std."""

    level: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.level <= 100:
            raise ValueError(f"noise level must be in [0, 100], got {self.level}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _label_index(label_column, width):
    if label_column == "last":
        return width - 1
    try:
        idx = int(label_column)
    except (TypeError, ValueError):
        raise DatasetError(f"label column must be an integer index or 'last', "
                           f"got {label_column!r}") from None
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DatasetError(f"label column {label_column} out of range for {width} columns")
    return idx


def load_csv(path, label_column="last", delimiter=",", has_header=False) -> Dataset:
    """Read a delimited text file with one label column.

    Labels are encoded ``0..K-1`` in order of first appearance.  Blank
    lines are skipped.  Missing values are not supported: every non-label
    cell must parse as a float.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]

    header = None
    if has_header:
        if not rows:
            raise DatasetError(f"{path}: empty file")
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if len(rows) < 2:
        raise DatasetError(f"{path}: need at least 2 data rows, got {len(rows)}")

    width = len(header) if header is not None else len(rows[0])
    if width < 2:
        raise DatasetError(f"{path}: need a label column and at least one feature")
    lab = _label_index(label_column, width)
    first_line = 2 if has_header else 1

    points = np.empty((len(rows), width - 1))
    tokens = []
    for r, row in enumerate(rows):
        line = r + first_line
        if len(row) != width:
            raise DatasetError(f"{path}: line {line} has {len(row)} fields, expected {width}")
        tokens.append(row[lab].strip())
        for j, cell in enumerate(c for k, c in enumerate(row) if k != lab):
            try:
                points[r, j] = float(cell)
            except ValueError:
                col = j if j < lab else j + 1
                raise DatasetError(
                    f"{path}: cannot parse {cell!r} as a number at row {line}, column {col}"
                ) from None

    class_names = list(dict.fromkeys(tokens))
    code = {name: k for k, name in enumerate(class_names)}
    labels = np.array([code[t] for t in tokens])
    if header is not None:
        feature_names = tuple(h for k, h in enumerate(header) if k != lab)
        label_name = header[lab]
    else:
        feature_names, label_name = (), "class"
    return Dataset(points, labels, feature_names, tuple(class_names),
                   name=path.stem, label_name=label_name)


def write_csv(d: Dataset, path, label_column="last", delimiter=",", has_header=False):
    """Write ``d`` in the layout :func:`load_csv` reads back.

    Floats are written with ``repr`` so values round-trip exactly.
    """
    width = d.n_features + 1
    lab = _label_index(label_column, width)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        if has_header:
            names = list(d.feature_names)
            names.insert(lab, d.label_name)
            writer.writerow(names)
        for row, y in zip(d.points, d.labels):
            cells = [repr(float(v)) for v in row]
            cells.insert(lab, d.class_names[y])
            writer.writerow(cells)


def add_noise(d: Dataset, spec: NoiseSpec) -> Dataset:
    """Return a copy of ``d`` with seeded Gaussian attribute noise.

    Feature ``j`` receives zero-mean noise with standard deviation
    ``level/100 * s_j`` where ``s_j`` is its sample standard deviation, so
    constant features are left untouched.
    """
    if spec.level == 0:
        return d.with_points(d.points.copy())
    sigma = d.points.std(axis=0, ddof=1) * (spec.level / 100.0)
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal(d.points.shape) * sigma
    noisy = np.where(sigma > 0, d.points + noise, d.points)
    return d.with_points(noisy)


def from_arrays(points: Sequence, labels: Sequence, name="") -> Dataset:
    """Build a dataset from arbitrary label tokens (first-appearance coding)."""
    tokens = [str(t) for t in labels]
    class_names = list(dict.fromkeys(tokens))
    code = {c: k for k, c in enumerate(class_names)}
    return Dataset(np.asarray(points, dtype=float), np.array([code[t] for t in tokens]),
                   class_names=tuple(class_names), name=name)
