"""Distance-to-k-th-neighbor baseline detector.

Brute-force: no spatial index, O(N * Q * d) per scoring call, which is fine
at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .datasets import DataCloud
from .errors import DataError

_BLOCK_ELEMENTS = 4_000_000


@dataclass
class KnnModel:
    """Training features plus the neighbor rank used for scoring."""

    features: np.ndarray
    k: int


def fit_knn(cloud: DataCloud, k: int = 5) -> KnnModel:
    """Store the training features; k must lie in [1, N]."""
    if not 1 <= k <= cloud.n_samples:
        raise DataError(f"k must lie in [1, {cloud.n_samples}], got {k}")
    return KnnModel(cloud.features, int(k))


def knn_score(model: KnnModel, queries) -> np.ndarray:
    """Euclidean distance from each query to its k-th nearest training point.

    A query coinciding with a training point still counts that point, so its
    k=1 score is 0.  Higher = more outlying.
    """
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2:
        raise DataError("queries must form a 2-dimensional matrix")
    if queries.shape[1] != model.features.shape[1]:
        raise DataError(
            f"queries have dimension {queries.shape[1]}, expected {model.features.shape[1]}"
        )
    scores = np.empty(queries.shape[0])
    block = max(1, _BLOCK_ELEMENTS // model.features.shape[0])
    for start in range(0, queries.shape[0], block):
        distances = cdist(queries[start : start + block], model.features)
        scores[start : start + block] = np.partition(distances, model.k - 1, axis=1)[:, model.k - 1]
    return scores
