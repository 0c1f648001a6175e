"""The adaptive minipatch boosting loop.

Each iteration samples a row subset R ~ p and a column subset C ~ q,
fits a tree to that minipatch, adds its +-1 votes to the running ensemble
output F on every training row and to the out-of-patch output G on rows
outside R, then re-weights p by per-row loss and q by the tree's feature
importances.  Out-of-patch accuracy (the fraction of rows whose G sign
matches the label) drives the stopping rule.

Sign conventions: inside losses and accuracies sign(0) counts as wrong,
which keeps the out-of-patch estimate conservative; prediction breaks
zero margins to +1 so the classifier is total.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset
from .sampler import RNG_ALGORITHM, make_rng, sample_without_replacement, uniform
from .stopping import StoppingState
from .tree import (
    DecisionTree,
    apply_tree,
    fit_tree,
    impurity_importance,
    permutation_importance,
)

LOSS_KINDS = ("soft-exponential", "soft-logistic", "hard-exponential", "hard-logistic")
IMPORTANCE_BACKENDS = ("impurity", "permutation")

# |y*F| clamp before exponentiation; invisible after normalization until
# weights differ by a factor of e^50.
MARGIN_CLAMP = 50.0


@dataclass(frozen=True)
class Hyperparams:
    n: int                      # minipatch rows
    m: int                      # minipatch columns
    mu: float = 0.5             # momentum for the feature-probability update
    loss_kind: str = "soft-logistic"
    depth_limit: int | None = None   # None = saturated trees
    t_max: int = 2000
    adaptive_rows: bool = True
    adaptive_cols: bool = True
    importance_backend: str = "impurity"
    seed: int = 0

    def validate(self, n_rows: int, n_cols: int) -> None:
        if not 1 <= self.n <= n_rows:
            raise ValueError(f"n must be in [1, {n_rows}], got {self.n}")
        if not 1 <= self.m <= n_cols:
            raise ValueError(f"m must be in [1, {n_cols}], got {self.m}")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must be in (0, 1)")
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.importance_backend not in IMPORTANCE_BACKENDS:
            raise ValueError(f"importance_backend must be one of {IMPORTANCE_BACKENDS}")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.depth_limit is not None and self.depth_limit < 1:
            raise ValueError("depth_limit must be >= 1 or None")


def default_hyperparams(n_rows: int, n_cols: int, **overrides) -> Hyperparams:
    """Defaults: 10% of rows and columns, mu=0.5, soft-logistic, saturated."""
    hp = Hyperparams(n=math.ceil(0.1 * n_rows), m=math.ceil(0.1 * n_cols))
    return replace(hp, **overrides) if overrides else hp


def tuning_grid(n_cols: int) -> dict:
    """The documented hyperparameter search grid."""
    return {
        "n": [50, 100, 200, 500],
        "m": sorted({5, 10, 15, 20, math.ceil(math.sqrt(n_cols))}),
        "mu": [0.1, 0.3, 0.5, 0.7, 0.9],
    }


def loss_weights(kind: str, y, f) -> np.ndarray:
    """Elementwise loss L(y, f); strictly positive, decreasing in y*f."""
    if kind not in LOSS_KINDS:
        raise ValueError(f"loss_kind must be one of {LOSS_KINDS}")
    y = np.asarray(y, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    hard, shape = kind.split("-")
    z = y * np.sign(f) if hard == "hard" else y * f
    z = np.clip(z, -MARGIN_CLAMP, MARGIN_CLAMP)
    if shape == "exponential":
        return np.exp(-z)
    return 1.0 / (1.0 + np.exp(z))


def loss(kind: str, y: int, f: float) -> float:
    """Scalar form of loss_weights."""
    return float(loss_weights(kind, y, f))


@dataclass
class TrainState:
    """Mutable per-run accumulators for the boosting loop."""

    p: np.ndarray               # observation distribution over N rows
    q: np.ndarray               # feature distribution over M columns
    F: np.ndarray               # ensemble output per training row
    G: np.ndarray               # out-of-patch output per training row
    oop_history: list = field(default_factory=list)
    t: int = 0

    @classmethod
    def initial(cls, n_rows: int, n_cols: int) -> "TrainState":
        return cls(
            p=uniform(n_rows),
            q=uniform(n_cols),
            F=np.zeros(n_rows),
            G=np.zeros(n_rows),
        )


def accumulate_outputs(state: TrainState, tree: DecisionTree, columns, rows, X) -> np.ndarray:
    """Add the tree's votes to F (all rows) and G (rows outside the patch).

    Returns the vote vector so callers can reuse it.
    """
    votes = apply_tree(tree, X[:, columns])
    state.F += votes
    outside = np.ones(state.F.shape[0], dtype=bool)
    outside[rows] = False
    state.G[outside] += votes[outside]
    return votes


def update_observation_probs(state: TrainState, labels, kind: str,
                             adaptive: bool = True) -> None:
    """Set p to the normalized per-row losses of the current F; no-op when
    adaptive sampling of rows is off."""
    if not adaptive:
        return
    w = loss_weights(kind, labels, state.F)
    state.p = w / w.sum()


def update_feature_probs(state: TrainState, columns, importance, mu: float,
                         adaptive: bool = True) -> None:
    """Momentum-mix q toward the tree's importances inside the minipatch.

    Only entries in `columns` change, and their total mass is conserved.
    A flagged all-zero importance (split-less tree) leaves q untouched.
    """
    if not adaptive:
        return
    importance = np.asarray(importance, dtype=np.float64)
    if importance.sum() <= 0.0:
        return
    in_patch_mass = state.q[columns].sum()
    state.q[columns] = (1.0 - mu) * state.q[columns] + (mu * in_patch_mass) * importance


def oop_accuracy(state: TrainState, labels) -> float:
    """Fraction of rows whose out-of-patch sign matches the label.

    sign(G)=0 never matches a +-1 label, so undecided rows count as wrong.
    """
    return float((np.sign(state.G) == labels).mean())


@dataclass
class PatchRecord:
    """Audit record of one iteration (diagnostics mode)."""

    t: int
    rows: np.ndarray
    q_mass_before: float
    q_mass_after: float


@dataclass
class Diagnostics:
    """Per-iteration curves, final accumulators, optional minipatch audit log."""

    iterations: np.ndarray      # int, 1-based
    train_accuracy: np.ndarray
    oop: np.ndarray
    test_accuracy: np.ndarray | None
    stopped_early: bool
    final_F: np.ndarray | None = None
    final_G: np.ndarray | None = None
    patch_log: list | None = None


@dataclass
class MinipatchEnsemble:
    """The trained model: (tree, global column indices) pairs plus metadata."""

    learners: list              # [(DecisionTree, np.ndarray columns), ...]
    best_iteration: int
    final_p: np.ndarray
    final_q: np.ndarray
    hyperparams: Hyperparams
    metadata: dict

    @property
    def n_features(self) -> int:
        return self.metadata["n_cols"]


def _used_learners(model: MinipatchEnsemble, use_best: bool):
    if use_best:
        return model.learners[: model.best_iteration]
    return model.learners


def predict_margin_many(model: MinipatchEnsemble, X, use_best: bool = True) -> np.ndarray:
    """Summed votes for each row of X."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"feature width mismatch: model expects {model.n_features} columns, "
            f"input has {X.shape[1] if X.ndim == 2 else X.shape}"
        )
    margins = np.zeros(X.shape[0])
    for tree, columns in _used_learners(model, use_best):
        margins += apply_tree(tree, X[:, columns])
    return margins


def predict_many(model: MinipatchEnsemble, X, use_best: bool = True) -> np.ndarray:
    """+-1 labels for each row of X; zero margins break to +1."""
    margins = predict_margin_many(model, X, use_best)
    return np.where(margins >= 0.0, 1, -1).astype(np.int64)


def predict_margin(model: MinipatchEnsemble, row, use_best: bool = True) -> float:
    return float(predict_margin_many(model, np.asarray(row, dtype=np.float64)[None, :], use_best)[0])


def predict(model: MinipatchEnsemble, row, use_best: bool = True) -> int:
    return int(predict_many(model, np.asarray(row, dtype=np.float64)[None, :], use_best)[0])


def train(data: Dataset, hp: Hyperparams | None = None, test_data: Dataset | None = None,
          early_stop: bool = True, keep_patch_log: bool = False):
    """Run the boosting loop; returns (MinipatchEnsemble, Diagnostics).

    With early_stop the loop halts when the stopping rule fires (reaching
    t_max is normal termination either way); early_stop=False keeps
    training to t_max, which is useful for inspecting curves past the
    stopping point.  keep_patch_log records per-iteration row subsets and
    in-patch q mass for auditing.

    Deterministic: identical (data, hp) give identical models and curves.
    """
    if hp is None:
        hp = default_hyperparams(data.n_rows, data.n_cols)
    hp.validate(data.n_rows, data.n_cols)
    if test_data is not None and test_data.n_cols != data.n_cols:
        raise ValueError("test data width differs from training data")

    X, y = data.features, data.labels
    rng = make_rng(hp.seed)
    state = TrainState.initial(data.n_rows, data.n_cols)
    stopper = StoppingState(n_rows=data.n_rows, patch_rows=hp.n, t_max=hp.t_max)

    learners = []
    train_acc_hist, oop_hist, test_acc_hist = [], [], []
    patch_log = [] if keep_patch_log else None
    if test_data is not None:
        F_test = np.zeros(test_data.n_rows)
    stopped_early = False

    for t in range(1, hp.t_max + 1):
        state.t = t
        rows = sample_without_replacement(hp.n, state.p, rng)
        columns = sample_without_replacement(hp.m, state.q, rng)
        patch = X[np.ix_(rows, columns)]
        tree = fit_tree(patch, y[rows], depth_limit=hp.depth_limit)

        q_mass_before = float(state.q[columns].sum())
        votes = accumulate_outputs(state, tree, columns, rows, X)
        update_observation_probs(state, y, hp.loss_kind, adaptive=hp.adaptive_rows)
        if hp.importance_backend == "impurity":
            importance = impurity_importance(tree)
        else:
            importance = permutation_importance(tree, patch, y[rows], rng=rng)
        update_feature_probs(state, columns, importance, hp.mu,
                             adaptive=hp.adaptive_cols)
        q_mass_after = float(state.q[columns].sum())

        oop_t = oop_accuracy(state, y)
        state.oop_history.append(oop_t)
        train_acc_hist.append(float((np.sign(state.F) == y).mean()))
        oop_hist.append(oop_t)
        if test_data is not None:
            F_test += apply_tree(tree, test_data.features[:, columns])
            test_acc_hist.append(float((np.sign(F_test) == test_data.labels).mean()))

        learners.append((tree, columns))
        if keep_patch_log:
            patch_log.append(PatchRecord(t, rows.copy(), q_mass_before, q_mass_after))

        halt = stopper.observe(oop_t, t)
        if early_stop and halt:
            stopped_early = True
            break

    model = MinipatchEnsemble(
        learners=learners,
        best_iteration=stopper.best_iteration,
        final_p=state.p.copy(),
        final_q=state.q.copy(),
        hyperparams=hp,
        metadata={
            "seed": hp.seed,
            "rng": RNG_ALGORITHM,
            "n_rows": data.n_rows,
            "n_cols": data.n_cols,
            "feature_names": data.feature_names if data.feature_names else None,
        },
    )
    diagnostics = Diagnostics(
        iterations=np.arange(1, len(learners) + 1),
        train_accuracy=np.array(train_acc_hist),
        oop=np.array(oop_hist),
        test_accuracy=np.array(test_acc_hist) if test_data is not None else None,
        stopped_early=stopped_early,
        final_F=state.F.copy(),
        final_G=state.G.copy(),
        patch_log=patch_log,
    )
    return model, diagnostics
