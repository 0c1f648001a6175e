"""CART-style binary decision trees used as minipatch weak learners.

Splits maximize Gini impurity decrease over all features and all midpoints
between consecutive distinct sorted values.  Ties break to the lowest
feature index, then the lowest threshold; leaf-label ties break to +1.
Growth stops when a node is pure, the depth limit is reached, or the node
is unsplittable (no column has two distinct values); zero-gain splits are
accepted, otherwise impure nodes like XOR corners could never reach pure
leaves.  depth_limit=None means saturated (grow until pure or
unsplittable).

Nodes are stored as parallel arrays so the traversal kernel can run over
them directly; ``feature[i] == -1`` marks a leaf.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend


@dataclass
class DecisionTree:
    feature: np.ndarray        # int32, -1 at leaves
    threshold: np.ndarray      # float64, 0 at leaves
    left: np.ndarray           # int32, -1 at leaves
    right: np.ndarray          # int32, -1 at leaves
    leaf_label: np.ndarray     # int8, 0 at internal nodes
    n_node_samples: np.ndarray  # int32
    gain: np.ndarray           # float64 impurity decrease, 0 at leaves
    n_features: int
    depth_limit: int | None

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_splits(self) -> int:
        return int((self.feature >= 0).sum())


def fit_tree(X_mp, y_mp, depth_limit: int | None = None, rng=None) -> DecisionTree:
    """Grow a greedy CART tree on a minipatch.

    rng is accepted for interface compatibility but never consumed: all
    ties break deterministically.
    """
    X = np.ascontiguousarray(X_mp, dtype=np.float64)
    y = np.asarray(y_mp)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("minipatch must be a nonempty 2-D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("labels length must match minipatch rows")
    if not np.isfinite(X).all():
        raise ValueError("minipatch contains non-finite values")
    if depth_limit is not None and depth_limit < 1:
        raise ValueError("depth_limit must be >= 1 (or None for saturated)")

    y01 = (y > 0).astype(np.int32)
    sort_idx = np.argsort(X, axis=0, kind="stable").astype(np.int32)

    feature, threshold, left, right = [], [], [], []
    leaf_label, node_count, node_gain = [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_label.append(0)
        node_count.append(0)
        node_gain.append(0.0)
        return len(feature) - 1

    # explicit stack (preorder, left child first) so chain-shaped trees
    # cannot hit the interpreter recursion limit
    stack = [(np.ones(X.shape[0], dtype=np.uint8), 0, -1, False)]
    while stack:
        member, depth, parent, is_left = stack.pop()
        node = new_node()
        if parent >= 0:
            if is_left:
                left[parent] = node
            else:
                right[parent] = node
        n_node = int(member.sum())
        pos = int(y01[member.view(np.bool_)].sum())
        node_count[node] = n_node

        splittable = 0 < pos < n_node and (depth_limit is None or depth < depth_limit)
        if splittable:
            j, thr, gain = _backend.best_split(X, y01, sort_idx, member, n_node, pos)
        else:
            j = -1
        if j < 0:
            # majority label; ties go to +1
            leaf_label[node] = 1 if 2 * pos >= n_node else -1
            continue

        feature[node] = j
        threshold[node] = thr
        node_gain[node] = gain
        go_left = member.view(np.bool_) & (X[:, j] <= thr)
        stack.append(((member.view(np.bool_) & ~go_left).view(np.uint8), depth + 1, node, False))
        stack.append((go_left.view(np.uint8), depth + 1, node, True))
    return DecisionTree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        leaf_label=np.array(leaf_label, dtype=np.int8),
        n_node_samples=np.array(node_count, dtype=np.int32),
        gain=np.array(node_gain, dtype=np.float64),
        n_features=X.shape[1],
        depth_limit=depth_limit,
    )


def apply_tree(tree: DecisionTree, X) -> np.ndarray:
    """Predict +-1 for every row of X (rows x tree.n_features)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != tree.n_features:
        raise ValueError(f"expected {tree.n_features} columns, got {X.shape}")
    return _backend.apply_tree(
        tree.feature, tree.threshold, tree.left, tree.right, tree.leaf_label, X
    )


def predict_tree(tree: DecisionTree, row) -> int:
    """Predict +-1 for a single row, routing left when value <= threshold."""
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (tree.n_features,):
        raise ValueError(f"expected a length-{tree.n_features} row, got {row.shape}")
    node = 0
    while tree.feature[node] >= 0:
        if row[tree.feature[node]] <= tree.threshold[node]:
            node = tree.left[node]
        else:
            node = tree.right[node]
    return int(tree.leaf_label[node])


def impurity_importance(tree: DecisionTree) -> np.ndarray:
    """Per-feature sum of count-weighted Gini decreases, normalized to 1.

    A split-less tree yields the all-zero vector (the "no signal" flag).
    """
    scores = np.zeros(tree.n_features)
    internal = tree.feature >= 0
    if not internal.any():
        return scores
    root_n = float(tree.n_node_samples[0])
    weighted = (tree.n_node_samples[internal] / root_n) * tree.gain[internal]
    np.add.at(scores, tree.feature[internal], weighted)
    scores = np.clip(scores, 0.0, None)  # gains can round to -1e-17 at zero
    total = scores.sum()
    if total <= 0.0:
        return np.zeros(tree.n_features)
    return scores / total


def permutation_importance(tree: DecisionTree, X_mp, y_mp, repeats: int = 5,
                           rng=None) -> np.ndarray:
    """Mean accuracy drop per shuffled feature, clipped at 0, normalized.

    Returns the all-zero vector when no shuffle hurts accuracy.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    X = np.ascontiguousarray(X_mp, dtype=np.float64)
    y = np.asarray(y_mp)
    n = X.shape[0]
    base = float((apply_tree(tree, X) == y).mean())
    drops = np.zeros(tree.n_features)
    for j in range(tree.n_features):
        total = 0.0
        for _ in range(repeats):
            shuffled = X.copy()
            shuffled[:, j] = X[rng.permutation(n), j]
            total += base - float((apply_tree(tree, shuffled) == y).mean())
        drops[j] = total / repeats
    drops = np.clip(drops, 0.0, None)
    mass = drops.sum()
    if mass <= 0.0:
        return np.zeros(tree.n_features)
    return drops / mass
