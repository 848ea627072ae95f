"""K-nearest-neighbor classification over encoded case vectors.

Neighbors are ranked by Euclidean distance (squared distances give the same
order). Ties in computed distance keep the lower training-row index, vote
ties resolve toward the higher risk label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import N_LABELS, FeatureMatrix

_QUERY_CHUNK = 512  # bounds the distance-matrix block to a few dozen MB


@dataclass
class KNNModel:
    train_values: np.ndarray
    train_labels: np.ndarray
    k: int

    @property
    def width(self) -> int:
        return self.train_values.shape[1]

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        if X.shape[1] != self.width:
            raise ValueError(f"expected width {self.width}, got {X.shape[1]}")
        ranked = neighbor_labels(self.train_values, self.train_labels, X, self.k)
        labels = vote(ranked, self.k)
        return labels[0] if squeeze else labels


def knn_fit(train, k: int) -> KNNModel:
    if isinstance(train, FeatureMatrix):
        X, y = train.values, train.labels
    else:
        X, y = train
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must satisfy 1 <= k <= {X.shape[0]}, got {k}")
    return KNNModel(X, y, k)


def knn_predict(model: KNNModel, x) -> int:
    return int(model.predict(np.asarray(x, dtype=np.float64)))


def neighbor_labels(
    train_values: np.ndarray, train_labels: np.ndarray, X: np.ndarray, k_max: int
) -> np.ndarray:
    """(n_queries, k_max) labels of each query's nearest training rows.

    Computed once it serves every k <= k_max, which is how a grid over k
    avoids recomputing distances.
    """
    train_sq = np.einsum("ij,ij->i", train_values, train_values)
    out = np.empty((X.shape[0], k_max), dtype=np.int64)
    for start in range(0, X.shape[0], _QUERY_CHUNK):
        chunk = X[start : start + _QUERY_CHUNK]
        d2 = train_sq[None, :] - 2.0 * (chunk @ train_values.T)
        # query norms omitted: constant per row, order unchanged
        ranked = np.argsort(d2, axis=1, kind="stable")[:, :k_max]
        out[start : start + _QUERY_CHUNK] = train_labels[ranked]
    return out


def vote(ranked_labels: np.ndarray, k: int) -> np.ndarray:
    """Majority label among the first k columns; ties pick the higher label."""
    counts = np.stack([(ranked_labels[:, :k] == c).sum(axis=1) for c in range(N_LABELS)], axis=1)
    return (N_LABELS - 1) - np.argmax(counts[:, ::-1], axis=1)
