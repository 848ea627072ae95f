"""Trained-model serialization: a versioned JSON document per model.

Floats are emitted through Python's shortest round-trip repr, so centroid and
tree parameters reload exactly. One-hot training matrices (the k-NN state)
are stored as per-row active column indices; anything non-binary falls back
to dense lists.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baseline import RuleSystem
from .dataset import RiskLabel
from .knn import KNNModel
from .nearest_centroid import NearestCentroidModel
from .trees import ForestModel, TreeModel

FORMAT_TAG = "recidrisk-model"
FORMAT_VERSION = 1


def _opt(array) -> list | None:
    return None if array is None else np.asarray(array).tolist()


def _nc_state(model: NearestCentroidModel) -> dict:
    return {
        "classes": model.classes.tolist(),
        "centroids": model.centroids.tolist(),
        "overall_centroid": model.overall_centroid.tolist(),
        "s": _opt(model.s),
        "s0": model.s0,
        "offsets": _opt(model.offsets),
        "shrunken_centroids": _opt(model.shrunken_centroids),
        "metric": model.metric,
        "p": model.p,
        "shrink_threshold": model.shrink_threshold,
    }


def _nc_restore(state: dict) -> NearestCentroidModel:
    def arr(key):
        return None if state[key] is None else np.asarray(state[key], dtype=np.float64)

    return NearestCentroidModel(
        classes=np.asarray(state["classes"], dtype=np.int64),
        centroids=np.asarray(state["centroids"], dtype=np.float64),
        overall_centroid=np.asarray(state["overall_centroid"], dtype=np.float64),
        s=arr("s"),
        s0=state["s0"],
        offsets=arr("offsets"),
        shrunken_centroids=arr("shrunken_centroids"),
        metric=state["metric"],
        p=state["p"],
        shrink_threshold=state["shrink_threshold"],
    )


def _matrix_state(values: np.ndarray) -> dict:
    if ((values == 0.0) | (values == 1.0)).all():
        return {
            "encoding": "active-columns",
            "width": values.shape[1],
            "rows": [np.nonzero(row)[0].tolist() for row in values],
        }
    return {"encoding": "dense", "width": values.shape[1], "rows": values.tolist()}


def _matrix_restore(state: dict) -> np.ndarray:
    if state["encoding"] == "dense":
        return np.asarray(state["rows"], dtype=np.float64)
    values = np.zeros((len(state["rows"]), state["width"]), dtype=np.float64)
    for i, cols in enumerate(state["rows"]):
        values[i, cols] = 1.0
    return values


def _knn_state(model: KNNModel) -> dict:
    return {
        "k": model.k,
        "train_labels": model.train_labels.tolist(),
        "train_values": _matrix_state(model.train_values),
    }


def _knn_restore(state: dict) -> KNNModel:
    return KNNModel(
        train_values=_matrix_restore(state["train_values"]),
        train_labels=np.asarray(state["train_labels"], dtype=np.int64),
        k=state["k"],
    )


def _tree_state(model: TreeModel) -> dict:
    return {
        "feature": model.feature.tolist(),
        "threshold": model.threshold.tolist(),
        "left": model.left.tolist(),
        "right": model.right.tolist(),
        "counts": model.counts.tolist(),
        "n_features": model.n_features,
        "criterion": model.criterion,
        "splitter": model.splitter,
        "max_depth": model.max_depth,
    }


def _tree_restore(state: dict) -> TreeModel:
    return TreeModel(
        feature=np.asarray(state["feature"], dtype=np.int32),
        threshold=np.asarray(state["threshold"], dtype=np.float64),
        left=np.asarray(state["left"], dtype=np.int32),
        right=np.asarray(state["right"], dtype=np.int32),
        counts=np.asarray(state["counts"], dtype=np.int64),
        n_features=state["n_features"],
        criterion=state["criterion"],
        splitter=state["splitter"],
        max_depth=state["max_depth"],
    )


def _forest_state(model: ForestModel) -> dict:
    return {
        "trees": [_tree_state(tree) for tree in model.trees],
        "n_features": model.n_features,
        "criterion": model.criterion,
        "max_depth": model.max_depth,
        "seed": model.seed,
        "bootstrap": model.bootstrap,
    }


def _forest_restore(state: dict) -> ForestModel:
    return ForestModel(
        trees=[_tree_restore(t) for t in state["trees"]],
        n_features=state["n_features"],
        criterion=state["criterion"],
        max_depth=state["max_depth"],
        seed=state["seed"],
        bootstrap=state["bootstrap"],
    )


def _rule_state(model: RuleSystem) -> dict:
    return {"name": model.name, "mapping": [int(v) for v in model.mapping]}


def _rule_restore(state: dict) -> RuleSystem:
    return RuleSystem(state["name"], tuple(RiskLabel(v) for v in state["mapping"]))


_FAMILIES = {
    NearestCentroidModel: ("nc", _nc_state),
    KNNModel: ("knn", _knn_state),
    TreeModel: ("tree", _tree_state),
    ForestModel: ("forest", _forest_state),
    RuleSystem: ("rule_system", _rule_state),
}

_RESTORERS = {
    "nc": _nc_restore,
    "knn": _knn_restore,
    "tree": _tree_restore,
    "forest": _forest_restore,
    "rule_system": _rule_restore,
}


def model_family(model) -> str:
    for cls, (family, _) in _FAMILIES.items():
        if isinstance(model, cls):
            return family
    raise TypeError(f"cannot serialize models of type {type(model).__name__}")


def save_model(path: str | Path, model, extra: dict | None = None) -> None:
    family, to_state = _FAMILIES[type(model)]
    payload = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "family": family,
        "state": to_state(model),
    }
    if extra:
        payload["extra"] = extra
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_model(path: str | Path):
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: not a {FORMAT_TAG} file")
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format version {payload.get('version')}")
    family = payload.get("family")
    if family not in _RESTORERS:
        raise ValueError(f"{path}: unknown model family {family!r}")
    return _RESTORERS[family](payload["state"])
