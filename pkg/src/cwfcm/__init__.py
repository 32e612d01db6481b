"""Fuzzy c-means with pluggable, feature-weighted distances.

The headline configuration (``preset("cwfcm", c)``) clusters with a
Canberra dissimilarity whose per-feature terms are weighted by min-max
scaled variance-to-mean ratios, starting from a deterministic partition
derived from each point's L1 norm.
"""

from .dataset import Dataset, DatasetError, NoiseSpec, add_noise, load_csv, write_csv
from .distance import DistanceSpec, distance, mahalanobis_matrix_from, pairwise
from .engine import (EmptyClusterError, FcmConfig, NonFiniteObjectiveError, RunResult, fit,
                     init_random, init_sf, objective, preset, update_centers,
                     update_memberships)
from .evaluation import EvaluationReport, accuracy, evaluate, purity, rand_index
from .stats import FriedmanResult, ScoreMatrix, friedman, nemenyi, studentized_range_sf
from .weighting import WeightVector, feature_weights, fuzzify, sf_values, vmr

__version__ = "0.1.0"

__all__ = [
    "Dataset", "DatasetError", "NoiseSpec", "add_noise", "load_csv", "write_csv",
    "DistanceSpec", "distance", "mahalanobis_matrix_from", "pairwise",
    "EmptyClusterError", "FcmConfig", "NonFiniteObjectiveError", "RunResult", "fit",
    "init_random", "init_sf", "objective", "preset", "update_centers", "update_memberships",
    "EvaluationReport", "accuracy", "evaluate", "purity", "rand_index",
    "FriedmanResult", "ScoreMatrix", "friedman", "nemenyi", "studentized_range_sf",
    "WeightVector", "feature_weights", "fuzzify", "sf_values", "vmr",
]
