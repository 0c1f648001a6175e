"""Versioned text serialization of trained ensembles.

Models are written as a single JSON document (format_version 1): metadata,
one record per learner (tree node arrays plus its global column list), and
the final observation/feature distributions.  Floats are serialized with
shortest round-trip repr, so save -> load reproduces predictions exactly
and identical models serialize to identical bytes.
"""

import json

import numpy as np

from .boost import Hyperparams, MinipatchEnsemble
from .tree import DecisionTree

MODEL_FORMAT_VERSION = 1


class ModelFormatError(Exception):
    """A model file is malformed or has an unsupported format version."""


def _tree_to_dict(tree: DecisionTree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "leaf_label": tree.leaf_label.tolist(),
        "n_node_samples": tree.n_node_samples.tolist(),
        "gain": tree.gain.tolist(),
        "depth_limit": tree.depth_limit,
    }


def _tree_from_dict(obj: dict, n_features: int) -> DecisionTree:
    try:
        return DecisionTree(
            feature=np.array(obj["feature"], dtype=np.int32),
            threshold=np.array(obj["threshold"], dtype=np.float64),
            left=np.array(obj["left"], dtype=np.int32),
            right=np.array(obj["right"], dtype=np.int32),
            leaf_label=np.array(obj["leaf_label"], dtype=np.int8),
            n_node_samples=np.array(obj["n_node_samples"], dtype=np.int32),
            gain=np.array(obj["gain"], dtype=np.float64),
            n_features=n_features,
            depth_limit=obj["depth_limit"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed tree record: {exc}") from None


def serialize_model(model: MinipatchEnsemble) -> str:
    hp = model.hyperparams
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "metadata": {
            "seed": model.metadata["seed"],
            "rng": model.metadata["rng"],
            "n_rows": model.metadata["n_rows"],
            "n_cols": model.metadata["n_cols"],
            "feature_names": model.metadata.get("feature_names"),
            "best_iteration": model.best_iteration,
            "hyperparams": {
                "n": hp.n,
                "m": hp.m,
                "mu": hp.mu,
                "loss_kind": hp.loss_kind,
                "depth_limit": hp.depth_limit,
                "t_max": hp.t_max,
                "adaptive_rows": hp.adaptive_rows,
                "adaptive_cols": hp.adaptive_cols,
                "importance_backend": hp.importance_backend,
                "seed": hp.seed,
            },
        },
        "learners": [
            {"columns": columns.tolist(), "tree": _tree_to_dict(tree)}
            for tree, columns in model.learners
        ],
        "final_p": model.final_p.tolist(),
        "final_q": model.final_q.tolist(),
    }
    return json.dumps(document) + "\n"


def deserialize_model(text: str) -> MinipatchEnsemble:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a valid model file: {exc}") from None
    if not isinstance(document, dict):
        raise ModelFormatError("not a valid model file: expected a JSON object")
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r} "
            f"(this build reads version {MODEL_FORMAT_VERSION})"
        )
    try:
        meta = document["metadata"]
        n_cols = meta["n_cols"]
        hp = Hyperparams(**meta["hyperparams"])
        learners = [
            (
                _tree_from_dict(rec["tree"], len(rec["columns"])),
                np.array(rec["columns"], dtype=np.int64),
            )
            for rec in document["learners"]
        ]
        model = MinipatchEnsemble(
            learners=learners,
            best_iteration=meta["best_iteration"],
            final_p=np.array(document["final_p"], dtype=np.float64),
            final_q=np.array(document["final_q"], dtype=np.float64),
            hyperparams=hp,
            metadata={
                "seed": meta["seed"],
                "rng": meta["rng"],
                "n_rows": meta["n_rows"],
                "n_cols": n_cols,
                "feature_names": tuple(meta["feature_names"]) if meta["feature_names"] else None,
            },
        )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    return model


def save_model(model: MinipatchEnsemble, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_model(model))


def load_model(path) -> MinipatchEnsemble:
    try:
        with open(path, encoding="utf-8") as handle:
            return deserialize_model(handle.read())
    except OSError as exc:
        raise ModelFormatError(f"cannot open {path}: {exc}") from None
