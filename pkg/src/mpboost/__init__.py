"""Adaptive minipatch boosting for binary classification.

Trains an ensemble of small decision trees, each fit to a tiny adaptively
sampled row/column submatrix ("minipatch") of the data.  Alongside the
classifier it learns a probability distribution over observations
(upweighting hard examples) and one over features (upweighting informative
columns), and stops automatically using an internal out-of-patch accuracy
estimate.
"""

from ._backend import BACKEND
from .boost import (
    Diagnostics,
    Hyperparams,
    MinipatchEnsemble,
    TrainState,
    accumulate_outputs,
    default_hyperparams,
    loss,
    loss_weights,
    oop_accuracy,
    predict,
    predict_many,
    predict_margin,
    predict_margin_many,
    train,
    tuning_grid,
    update_feature_probs,
    update_observation_probs,
)
from .dataset import (
    Dataset,
    DatasetError,
    generate_cones,
    load_csv,
    train_test_split,
    write_csv,
)
from .model_io import ModelFormatError, load_model, save_model
from .sampler import make_rng, sample_without_replacement, uniform
from .stopping import StoppingState
from .tree import (
    DecisionTree,
    apply_tree,
    fit_tree,
    impurity_importance,
    permutation_importance,
    predict_tree,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Dataset",
    "DatasetError",
    "DecisionTree",
    "Diagnostics",
    "Hyperparams",
    "MinipatchEnsemble",
    "ModelFormatError",
    "StoppingState",
    "TrainState",
    "accumulate_outputs",
    "apply_tree",
    "default_hyperparams",
    "fit_tree",
    "generate_cones",
    "impurity_importance",
    "load_csv",
    "load_model",
    "loss",
    "loss_weights",
    "make_rng",
    "oop_accuracy",
    "permutation_importance",
    "predict",
    "predict_many",
    "predict_margin",
    "predict_margin_many",
    "predict_tree",
    "sample_without_replacement",
    "save_model",
    "train",
    "train_test_split",
    "tuning_grid",
    "uniform",
    "update_feature_probs",
    "update_observation_probs",
    "write_csv",
]
