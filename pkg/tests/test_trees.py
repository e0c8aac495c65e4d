import numpy as np
import pytest

from marginboost import trees
from marginboost.dataset import Dataset
from marginboost.errors import DimensionMismatchError, InvalidParamsError
from marginboost.trees import (
    MODE_CLASSIFICATION,
    MODE_GRADIENT,
    GrowthConfig,
    Tree,
    fit_classification_tree,
    fit_regression_tree,
    predict_tree,
    tree_from_cells,
    tree_stats,
)


def uniform(m):
    return np.full(m, 1.0 / m)


def gini_gain_oracle(w, y, left_mask):
    """Plain-loop weighted-Gini gain for one candidate split."""

    def impurity(mask):
        W = w[mask].sum()
        if W == 0:
            return 0.0
        wp = w[mask & (y == 1)].sum()
        wn = w[mask & (y == -1)].sum()
        return W * (1 - (wp / W) ** 2 - (wn / W) ** 2)

    full = np.ones(len(w), dtype=bool)
    return impurity(full) - impurity(left_mask) - impurity(~left_mask)


class TestClassificationTree:
    def test_separable_pair_gives_stump(self):
        data = Dataset(np.array([[0.0], [1.0]]), np.array([-1, 1]))
        tree = fit_classification_tree(data, uniform(2), GrowthConfig(max_leaves=2, min_leaf=1))
        depth, leaves, _ = tree_stats(tree)
        assert (depth, leaves) == (1, 2)
        assert tree.threshold[0] == 0.5
        assert np.array_equal(tree.predict(data.X), data.y.astype(float))

    def test_pure_labels_single_leaf(self):
        data = Dataset(np.array([[0.0], [1.0], [2.0]]), np.array([1, 1, 1]))
        tree = fit_classification_tree(data, uniform(3), GrowthConfig(max_leaves=4, min_leaf=1))
        assert tree_stats(tree) == (0, 1, (1.0, 1.0))

    def test_xor_stump_error_half(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([-1, 1, 1, -1])
        data = Dataset(X, y)
        w = uniform(4)
        # oracle: the 4 candidate stumps (2 features x 1 threshold x 2 signs)
        best_err = min(
            min(
                np.dot(w, np.where(X[:, f] < 0.5, s, -s) != y),
                np.dot(w, np.where(X[:, f] < 0.5, -s, s) != y),
            )
            for f in range(2)
            for s in (1,)
        )
        assert best_err == 0.5
        tree = fit_classification_tree(data, w, GrowthConfig(max_leaves=2, min_leaf=1))
        assert np.dot(w, tree.predict(X) != y) == 0.5

    def test_min_leaf_respected(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((30, 2))
        y = np.where(X[:, 0] > 0, 1, -1)
        data = Dataset(X, y)
        tree = fit_classification_tree(data, uniform(30), GrowthConfig(max_leaves=8, min_leaf=11))
        # with min_leaf=11 on 30 samples at most 2 leaves are feasible
        assert tree.leaf_count <= 2
        leaf_sizes = np.unique(
            np.searchsorted(np.flatnonzero(tree.is_leaf), _leaf_index(tree, X)),
            return_counts=True,
        )[1]
        assert np.all(leaf_sizes >= 11)

    def test_greedy_matches_bruteforce_on_small_instances(self):
        # the realized split sequence is the greedy max at each step
        rng = np.random.default_rng(42)
        for trial in range(20):
            m = int(rng.integers(4, 13))
            X = rng.standard_normal((m, 2)).round(1)
            y = rng.choice([-1, 1], size=m)
            if len(set(y)) < 2:
                continue
            w = rng.random(m)
            w /= w.sum()
            data = Dataset(X, y)
            tree = fit_classification_tree(data, w, GrowthConfig(max_leaves=3, min_leaf=1))
            if tree.leaf_count == 1:
                continue
            # root split must attain the brute-force max gain over all candidates
            best = 0.0
            for f in range(2):
                xs = np.unique(X[:, f])
                for t in (xs[:-1] + xs[1:]) / 2:
                    best = max(best, gini_gain_oracle(w, y, X[:, f] < t))
            realized = gini_gain_oracle(w, y, X[:, tree.feature[0]] < tree.threshold[0])
            assert realized == pytest.approx(best, abs=1e-12)


class TestRegressionTree:
    def test_hand_newton_step(self):
        X = np.array([[0.0], [0.0], [0.0], [0.0]])
        data = Dataset(X, np.array([1, 1, 1, -1]))
        g = np.array([-0.5, -0.5, -0.5, 0.5])
        h = np.full(4, 0.25)
        cfg = GrowthConfig(max_leaves=2, min_leaf=1, mode=MODE_GRADIENT)
        tree = fit_regression_tree(data, g, h, cfg)
        assert tree.leaf_count == 1  # identical features, no admissible split
        assert tree.value[0] == pytest.approx(1.0, abs=1e-12)

    def test_zero_gradients_zero_leaves(self):
        rng = np.random.default_rng(1)
        data = Dataset(rng.standard_normal((10, 2)), np.ones(10, dtype=int))
        cfg = GrowthConfig(max_leaves=4, min_leaf=1, mode=MODE_GRADIENT)
        tree = fit_regression_tree(data, np.zeros(10), np.ones(10), cfg)
        assert np.all(tree.value[tree.is_leaf] == 0.0)

    def test_min_leaf_blocks_split(self):
        rng = np.random.default_rng(2)
        data = Dataset(rng.standard_normal((30, 1)), np.ones(30, dtype=int))
        g = rng.standard_normal(30)
        cfg = GrowthConfig(max_leaves=4, min_leaf=20, mode=MODE_GRADIENT)
        tree = fit_regression_tree(data, g, np.ones(30), cfg)
        assert tree.leaf_count == 1  # 20+20 > 30

    def test_newton_closed_form_per_leaf(self):
        rng = np.random.default_rng(3)
        data = Dataset(rng.standard_normal((60, 3)), np.ones(60, dtype=int))
        g = rng.standard_normal(60)
        h = rng.random(60) + 0.1
        lam = 0.7
        cfg = GrowthConfig(max_leaves=6, min_leaf=3, mode=MODE_GRADIENT, lambda_l2=lam)
        tree = fit_regression_tree(data, g, h, cfg)
        leaf_of = _leaf_index(tree, data.X)
        for leaf in np.unique(leaf_of):
            mask = leaf_of == leaf
            expected = -g[mask].sum() / (h[mask].sum() + lam)
            assert tree.value[leaf] == pytest.approx(expected, abs=1e-12)

    def test_split_gain_positive_and_greedy(self):
        rng = np.random.default_rng(4)
        data = Dataset(rng.standard_normal((12, 1)), np.ones(12, dtype=int))
        g = rng.standard_normal(12)
        h = np.ones(12)
        cfg = GrowthConfig(max_leaves=3, min_leaf=1, mode=MODE_GRADIENT)
        tree = fit_regression_tree(data, g, h, cfg)

        def gain(idx, f, t):
            lm = data.X[idx, f] < t
            gl, hl = g[idx][lm].sum(), h[idx][lm].sum()
            gr, hr = g[idx][~lm].sum(), h[idx][~lm].sum()
            return gl**2 / hl + gr**2 / hr - (gl + gr) ** 2 / (hl + hr)

        xs = np.sort(data.X[:, 0])
        best = max(gain(np.arange(12), 0, t) for t in (xs[:-1] + xs[1:]) / 2)
        assert gain(np.arange(12), 0, tree.threshold[0]) == pytest.approx(best, abs=1e-12)


class TestPredict:
    def test_single_leaf_constant(self):
        tree = tree_from_cells([], [0.3])
        assert predict_tree(tree, [123.0]) == 0.3
        assert tree_stats(tree) == (0, 1, (0.3, 0.3))

    def test_stump_routing(self):
        tree = tree_from_cells([0.5], [-1.0, 1.0])
        assert predict_tree(tree, [0.2]) == -1.0
        assert predict_tree(tree, [0.5]) == 1.0  # >= threshold goes right
        assert tree_stats(tree) == (1, 2, (-1.0, 1.0))

    def test_routing_total(self):
        tree = tree_from_cells([-1.0, 0.0, 2.5], [1.0, 2.0, 3.0, 4.0])
        xs = np.array([[-5.0], [-1.0], [-0.5], [0.0], [1.0], [2.5], [9.0]])
        out = tree.predict(xs)
        assert list(out) == [1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]

    def test_dimension_mismatch(self):
        tree = tree_from_cells([0.0], [-1.0, 1.0], n_features=1)
        with pytest.raises(DimensionMismatchError):
            tree.predict(np.zeros((2, 3)))

    def test_training_samples_hit_assigned_leaf(self):
        rng = np.random.default_rng(5)
        data = Dataset(rng.standard_normal((50, 2)), rng.choice([-1, 1], 50))
        tree = fit_classification_tree(data, uniform(50), GrowthConfig(max_leaves=5, min_leaf=2))
        preds = tree.predict(data.X)
        assert np.all(np.isin(preds, (-1.0, 1.0)))


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(6)
        data = Dataset(rng.standard_normal((40, 3)), rng.choice([-1, 1], 40))
        tree = fit_classification_tree(data, uniform(40), GrowthConfig(max_leaves=5, min_leaf=2))
        clone = Tree.from_dict(tree.to_dict())
        assert np.array_equal(tree.predict(data.X), clone.predict(data.X))
        assert tree_stats(tree) == tree_stats(clone)


class TestConfig:
    def test_invalid_config(self):
        with pytest.raises(InvalidParamsError):
            GrowthConfig(max_leaves=1)
        with pytest.raises(InvalidParamsError):
            GrowthConfig(min_leaf=0)
        with pytest.raises(InvalidParamsError):
            GrowthConfig(mode="nope")


def _leaf_index(tree, X):
    idx = np.zeros(len(X), dtype=np.int64)
    while True:
        internal = tree.feature[idx] >= 0
        if not internal.any():
            return idx
        at = idx[internal]
        go_left = X[internal, tree.feature[at]] < tree.threshold[at]
        idx[internal] = np.where(go_left, tree.left[at], tree.right[at])
