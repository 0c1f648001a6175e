"""Tests for the CART weak learner and its feature-importance backends."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpboost.sampler import make_rng
from mpboost.tree import (
    apply_tree,
    fit_tree,
    impurity_importance,
    permutation_importance,
    predict_tree,
)


def brute_force_root_split(X, y):
    """Exhaustive search over every (feature, midpoint) candidate.

    Same tie rules as the implementation: strictly better gain wins,
    scanning features in order and thresholds in ascending order; any
    candidate (even zero gain) beats "no split".  Gains are evaluated
    from integer class counts with the textbook expression, so that
    mathematically tied candidates also tie bitwise.
    """
    n = X.shape[0]
    pos = int((y == 1).sum())
    pp, pn = pos / n, (n - pos) / n
    parent = 1.0 - pp * pp - pn * pn
    best = (-1, 0.0, -1.0)
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        for lo, hi in zip(values[:-1], values[1:]):
            thr = 0.5 * (lo + hi)
            if not thr < hi:
                thr = lo
            mask = X[:, j] <= thr
            nl = int(mask.sum())
            nr = n - nl
            pl = int((y[mask] == 1).sum())
            pr = pos - pl
            a, b = pl / nl, (nl - pl) / nl
            gini_l = 1.0 - a * a - b * b
            c, d = pr / nr, (nr - pr) / nr
            gini_r = 1.0 - c * c - d * d
            gain = (parent - (nl / n) * gini_l) - (nr / n) * gini_r
            if gain > best[2]:
                best = (j, thr, gain)
    return best


class TestFitTree:
    def test_separable_stump(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([-1, -1, 1, 1])
        tree = fit_tree(X, y, depth_limit=1)
        assert tree.n_splits == 1
        assert tree.threshold[0] == 2.5
        assert (apply_tree(tree, X) == y).all()

    def test_xor_depth_one_vs_saturated(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([-1, 1, 1, -1])
        stump = fit_tree(X, y, depth_limit=1)
        assert (apply_tree(stump, X) == y).mean() == 0.5
        saturated = fit_tree(X, y)
        assert (apply_tree(saturated, X) == y).mean() == 1.0

    def test_pure_node_is_single_leaf(self):
        X = np.array([[1.0], [2.0], [3.0]])
        tree = fit_tree(X, np.array([1, 1, 1]))
        assert tree.n_nodes == 1
        assert tree.n_splits == 0
        assert tree.leaf_label[0] == 1

    def test_saturated_memorizes_conflict_free_data(self):
        rng = make_rng(8)
        X = rng.standard_normal((40, 3))
        y = np.where(rng.random(40) < 0.5, 1, -1)
        tree = fit_tree(X, y)
        assert (apply_tree(tree, X) == y).all()
        for i in range(40):
            assert predict_tree(tree, X[i]) == y[i]

    def test_unsplittable_conflicting_rows_leaf_tie_goes_positive(self):
        X = np.array([[5.0], [5.0]])
        tree = fit_tree(X, np.array([1, -1]))
        assert tree.n_splits == 0
        assert tree.leaf_label[0] == 1

    def test_deterministic(self):
        rng = make_rng(4)
        X = rng.standard_normal((30, 4))
        y = np.where(rng.random(30) < 0.5, 1, -1)
        a = fit_tree(X, y)
        b = fit_tree(X, y)
        np.testing.assert_array_equal(a.feature, b.feature)
        np.testing.assert_array_equal(a.threshold, b.threshold)

    def test_depth_limit_respected(self):
        rng = make_rng(10)
        X = rng.standard_normal((64, 3))
        y = np.where(rng.random(64) < 0.5, 1, -1)
        tree = fit_tree(X, y, depth_limit=2)

        def depth(node):
            if tree.feature[node] < 0:
                return 0
            return 1 + max(depth(tree.left[node]), depth(tree.right[node]))

        assert depth(0) <= 2

    def test_empty_minipatch_rejected(self):
        with pytest.raises(ValueError):
            fit_tree(np.empty((0, 2)), np.empty(0))

    def test_chain_shaped_tree_does_not_blow_recursion(self):
        # alternating labels over sorted distinct values peel one row per
        # level, producing a depth ~n chain
        n = 3000
        X = np.arange(n, dtype=float).reshape(-1, 1)
        y = np.where(np.arange(n) % 2 == 0, 1, -1)
        tree = fit_tree(X, y)
        assert (apply_tree(tree, X) == y).all()

    @given(data=st.data())
    @settings(max_examples=100, deadline=None)
    def test_root_split_matches_brute_force(self, data):
        n = data.draw(st.integers(2, 50))
        m = data.draw(st.integers(1, 8))
        seed = data.draw(st.integers(0, 10_000))
        rng = make_rng(seed)
        # integer-valued features provoke ties between candidate splits
        X = rng.integers(0, 5, size=(n, m)).astype(float)
        y = np.where(rng.random(n) < 0.5, 1, -1)
        tree = fit_tree(X, y, depth_limit=1)
        j, thr, gain = brute_force_root_split(X, y)
        if len(set(y.tolist())) == 1 or j < 0:
            # pure or unsplittable: no root split to compare
            assert tree.n_splits == 0
        else:
            assert tree.feature[0] == j
            assert tree.threshold[0] == thr
            assert abs(tree.gain[0] - gain) < 1e-12


class TestPredictTree:
    def test_single_leaf_everywhere(self):
        tree = fit_tree(np.array([[0.0]]), np.array([1]))
        assert predict_tree(tree, [123.0]) == 1

    def test_stump_routes_left_on_equal(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        tree = fit_tree(X, np.array([-1, -1, 1, 1]), depth_limit=1)
        assert predict_tree(tree, [1.0]) == -1
        assert predict_tree(tree, [2.5]) == -1  # boundary value goes left
        assert predict_tree(tree, [2.6]) == 1

    def test_row_length_checked(self):
        tree = fit_tree(np.array([[0.0, 1.0]]), np.array([1]))
        with pytest.raises(ValueError):
            predict_tree(tree, [1.0])


class TestImpurityImportance:
    def test_stump_is_one_hot(self):
        rng = make_rng(0)
        X = rng.standard_normal((20, 5))
        y = np.where(X[:, 2] > 0, 1, -1)
        tree = fit_tree(X, y, depth_limit=1)
        scores = impurity_importance(tree)
        np.testing.assert_array_equal(scores, [0, 0, 1, 0, 0])

    def test_single_leaf_flagged_zero(self):
        tree = fit_tree(np.array([[1.0], [2.0]]), np.array([1, 1]))
        assert impurity_importance(tree).sum() == 0.0

    def test_depth_two_matches_hand_computation(self):
        # Root splits feature 0 (gain 0.28125 over 8 rows); its left child
        # splits feature 1 (gain 0.125 over 4 rows); feature 2 never splits.
        # Normalized count-weighted gains: [9/11, 2/11, 0].
        X = np.array(
            [
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
                [1.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
                [1.0, 0.0, 1.0],
                [1.0, 1.0, 1.0],
            ]
        )
        y = np.array([-1, -1, -1, 1, 1, 1, 1, 1])
        tree = fit_tree(X, y, depth_limit=2)
        assert tree.feature[0] == 0
        scores = impurity_importance(tree)
        np.testing.assert_allclose(scores, [9 / 11, 2 / 11, 0.0], atol=1e-12)

    def test_sums_to_one_with_unused_features_exactly_zero(self):
        rng = make_rng(2)
        X = rng.standard_normal((50, 6))
        y = np.where(X[:, 1] + X[:, 4] > 0, 1, -1)
        tree = fit_tree(X, y)
        scores = impurity_importance(tree)
        assert abs(scores.sum() - 1.0) < 1e-9
        used = set(tree.feature[tree.feature >= 0].tolist())
        for j in range(6):
            if j not in used:
                assert scores[j] == 0.0


class TestPermutationImportance:
    def test_unused_feature_has_zero_drop(self):
        rng = make_rng(1)
        X = rng.standard_normal((40, 2))
        y = np.where(X[:, 0] > 0, 1, -1)
        tree = fit_tree(X, y, depth_limit=1)
        scores = permutation_importance(tree, X, y, repeats=3, rng=make_rng(5))
        assert scores[1] == 0.0
        assert scores[0] == 1.0

    def test_shuffling_the_split_feature_hurts(self):
        X = np.linspace(-1, 1, 30).reshape(-1, 1)
        y = np.where(X[:, 0] > 0, 1, -1)
        tree = fit_tree(X, y, depth_limit=1)
        scores = permutation_importance(tree, X, y, repeats=5, rng=make_rng(6))
        assert scores[0] == 1.0

    def test_single_leaf_flagged_zero(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        tree = fit_tree(X, np.array([1, 1]))
        scores = permutation_importance(tree, X, np.array([1, 1]), rng=make_rng(0))
        assert scores.sum() == 0.0
