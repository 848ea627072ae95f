"""Nearest centroid classification with optional centroid shrinkage.

Each class present in the training data is summarized by its mean vector;
a query takes the label of the nearest centroid under the configured metric,
with exact distance ties resolved toward the higher risk label.

Shrinkage pulls per-class centroid offsets toward the overall centroid and
acts as feature selection. With pooled within-class deviations s_j,
s_0 = median_j(s_j) and m_k = sqrt(1/n_k - 1/n), the standardized offsets

    d_kj = (mean_kj - mean_j) / (m_k * (s_j + s_0))

are soft-thresholded at delta,

    d'_kj = sign(d_kj) * max(|d_kj| - delta, 0),

and the shrunken centroids are mean_j + m_k * (s_j + s_0) * d'_kj. Features
whose offsets vanish for every class no longer influence any distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import FeatureMatrix

METRICS = ("euclidean", "manhattan", "minkowski")

# Floor for the median deviation on degenerate (near-constant) data; leaves
# non-degenerate fits untouched.
_S0_REL_FLOOR = 1e-6
_S0_ABS_FLOOR = 1e-12


@dataclass
class NearestCentroidModel:
    classes: np.ndarray  # sorted labels present at fit time
    centroids: np.ndarray  # (k, d) raw class means
    overall_centroid: np.ndarray  # (d,)
    s: np.ndarray | None  # (d,) pooled within-class deviations (shrinkage only)
    s0: float | None
    offsets: np.ndarray | None  # (k, d) soft-thresholded d'_kj
    shrunken_centroids: np.ndarray | None
    metric: str = "euclidean"
    p: float = 2.0
    shrink_threshold: float | None = None

    @property
    def effective_centroids(self) -> np.ndarray:
        return self.centroids if self.shrink_threshold is None else self.shrunken_centroids

    @property
    def width(self) -> int:
        return self.centroids.shape[1]

    def selected_features(self) -> np.ndarray:
        """Mask of features with a nonzero shrunken offset in any class."""
        if self.offsets is None:
            return np.ones(self.width, dtype=bool)
        return (self.offsets != 0).any(axis=0)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        if X.shape[1] != self.width:
            raise ValueError(f"expected width {self.width}, got {X.shape[1]}")
        dist = _distances(X, self.effective_centroids, self.metric, self.p)
        # last argmin over ascending classes = higher-risk label on exact ties
        pick = dist.shape[1] - 1 - np.argmin(dist[:, ::-1], axis=1)
        labels = self.classes[pick]
        return labels[0] if squeeze else labels


def _distances(X: np.ndarray, centroids: np.ndarray, metric: str, p: float) -> np.ndarray:
    if metric == "minkowski":
        # route the exact-equivalence orders through the specialized paths so
        # p=2 predictions match euclidean bit for bit, not just in the limit
        if p == 2.0:
            metric = "euclidean"
        elif p == 1.0:
            metric = "manhattan"
    diff = np.abs(X[:, None, :] - centroids[None, :, :])
    if metric == "manhattan":
        return diff.sum(axis=2)
    if metric == "euclidean":
        return np.sqrt((diff * diff).sum(axis=2))
    return (diff**p).sum(axis=2) ** (1.0 / p)


def nc_fit(
    train,
    metric: str = "euclidean",
    shrink_threshold: float | None = None,
    p: float = 2.0,
) -> NearestCentroidModel:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    if metric == "minkowski" and p < 1:
        raise ValueError("minkowski order p must be >= 1")
    if shrink_threshold is not None and shrink_threshold < 0:
        raise ValueError("shrink_threshold must be >= 0 or None")
    if isinstance(train, FeatureMatrix):
        X, y = train.values, train.labels
    else:
        X, y = train
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty training set")

    classes, y_idx = np.unique(y, return_inverse=True)
    k, (n, d) = classes.size, X.shape
    n_per_class = np.bincount(y_idx, minlength=k)
    centroids = np.empty((k, d))
    for i in range(k):
        centroids[i] = X[y_idx == i].mean(axis=0)
    overall = X.mean(axis=0)

    if shrink_threshold is None:
        return NearestCentroidModel(
            classes, centroids, overall, None, None, None, None, metric, p, None
        )

    tiny = classes[n_per_class < 2]
    if tiny.size:
        raise ValueError(
            f"shrinkage needs >= 2 training rows per class; class {int(tiny[0])} has fewer"
        )
    within = X - centroids[y_idx]
    pooled_var = (within * within).sum(axis=0) / max(n - k, 1)
    s = np.sqrt(pooled_var)
    s0 = float(max(np.median(s), _S0_REL_FLOOR * s.max(initial=0.0), _S0_ABS_FLOOR))
    m = np.sqrt(1.0 / n_per_class - 1.0 / n)  # (k,)
    scale = m[:, None] * (s + s0)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        d_kj = np.where(scale > 0, (centroids - overall) / np.where(scale > 0, scale, 1.0), 0.0)
    offsets = np.sign(d_kj) * np.maximum(np.abs(d_kj) - shrink_threshold, 0.0)
    shrunken = overall + scale * offsets
    return NearestCentroidModel(
        classes, centroids, overall, s, s0, offsets, shrunken, metric, p, shrink_threshold
    )


def nc_predict(model: NearestCentroidModel, x) -> int:
    """Label of the single vector x under the model's metric and tie rule."""
    return int(model.predict(np.asarray(x, dtype=np.float64)))
