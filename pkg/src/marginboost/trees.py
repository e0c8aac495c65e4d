"""Axis-aligned decision trees with real leaf values.

Two fitting modes share one leaf-wise growth engine:
  * weighted_classification -- weighted-Gini splits, +-1 majority leaves
    (AdaBoost base learner);
  * gradient_newton -- second-order split gain G^2/(H+lambda), Newton leaf
    values -sum(g)/(sum(h)+lambda) (gradient-booster base learner).

Splits are exact: thresholds at midpoints between consecutive distinct
sorted feature values. Ties between equal gains resolve to the lowest
feature index, then the lowest threshold. Routing sends feature < threshold
left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DimensionMismatchError, EmptyDataError, InvalidParamsError

_GAIN_TOL = 1e-12

MODE_CLASSIFICATION = "weighted_classification"
MODE_GRADIENT = "gradient_newton"


@dataclass(frozen=True)
class GrowthConfig:
    max_leaves: int = 2
    min_leaf: int = 20
    mode: str = MODE_CLASSIFICATION
    lambda_l2: float = 0.0

    def __post_init__(self):
        if self.max_leaves < 2:
            raise InvalidParamsError("max_leaves must be >= 2")
        if self.min_leaf < 1:
            raise InvalidParamsError("min_leaf must be >= 1")
        if self.mode not in (MODE_CLASSIFICATION, MODE_GRADIENT):
            raise InvalidParamsError(f"unknown mode {self.mode!r}")
        if self.lambda_l2 < 0:
            raise InvalidParamsError("lambda_l2 must be >= 0")


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; node i is a leaf iff feature[i] < 0."""

    feature: np.ndarray  # int64, -1 marks a leaf
    threshold: np.ndarray  # float64, nan at leaves
    left: np.ndarray  # int64, -1 at leaves
    right: np.ndarray
    value: np.ndarray  # float64, leaf values (nan at internals)
    n_features: int

    def __post_init__(self):
        for name in ("feature", "threshold", "left", "right", "value"):
            getattr(self, name).setflags(write=False)

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature < 0

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.is_leaf))

    @property
    def depth(self) -> int:
        depths = self._node_depths()
        return int(depths[self.is_leaf].max())

    @property
    def output_range(self) -> tuple[float, float]:
        vals = self.value[self.is_leaf]
        return float(vals.min()), float(vals.max())

    def _node_depths(self) -> np.ndarray:
        depths = np.zeros(len(self.feature), dtype=np.int64)
        for i in range(len(self.feature)):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return depths

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf value for each row of X."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatchError(
                f"expected (*, {self.n_features}) features, got {X.shape}"
            )
        idx = np.zeros(len(X), dtype=np.int64)
        while True:
            internal = self.feature[idx] >= 0
            if not internal.any():
                break
            at = idx[internal]
            go_left = X[internal, self.feature[at]] < self.threshold[at]
            idx[internal] = np.where(go_left, self.left[at], self.right[at])
        return self.value[idx]

    def predict_one(self, x) -> float:
        x = np.asarray(x, dtype=np.float64).reshape(1, -1)
        return float(self.predict(x)[0])

    def to_dict(self) -> dict:
        nodes = []
        for i in range(len(self.feature)):
            if self.feature[i] < 0:
                nodes.append({"value": float(self.value[i])})
            else:
                nodes.append(
                    {
                        "feature": int(self.feature[i]),
                        "threshold": float(self.threshold[i]),
                        "left": int(self.left[i]),
                        "right": int(self.right[i]),
                    }
                )
        return {"n_features": self.n_features, "nodes": nodes}

    @classmethod
    def from_dict(cls, doc: dict) -> "Tree":
        nodes = doc["nodes"]
        n = len(nodes)
        feature = np.full(n, -1, dtype=np.int64)
        threshold = np.full(n, np.nan)
        left = np.full(n, -1, dtype=np.int64)
        right = np.full(n, -1, dtype=np.int64)
        value = np.full(n, np.nan)
        for i, nd in enumerate(nodes):
            if "value" in nd:
                value[i] = nd["value"]
            else:
                feature[i] = nd["feature"]
                threshold[i] = nd["threshold"]
                left[i] = nd["left"]
                right[i] = nd["right"]
        return cls(feature, threshold, left, right, value, int(doc["n_features"]))


def predict_tree(tree: Tree, features) -> float:
    return tree.predict_one(features)


def tree_stats(tree: Tree) -> tuple[int, int, tuple[float, float]]:
    """(depth, leaf_count, (min leaf value, max leaf value)); a single leaf
    has depth 0."""
    return tree.depth, tree.leaf_count, tree.output_range


class _Grower:
    """Mutable node list; converted to a Tree when growth finishes."""

    def __init__(self, n_features: int):
        self.feature, self.threshold = [], []
        self.left, self.right, self.value = [], [], []
        self.n_features = n_features

    def add_leaf(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(np.nan)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        return len(self.feature) - 1

    def make_internal(self, node: int, feature: int, threshold: float, left: int, right: int):
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right
        self.value[node] = np.nan

    def build(self) -> Tree:
        return Tree(
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=np.float64),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.value, dtype=np.float64),
            self.n_features,
        )


def _best_split(X, stats, idx, min_leaf, gain_fn):
    """Best (gain, feature, threshold) over exact midpoint candidates for the
    samples in `idx`, or None when no admissible split exists."""
    n = len(idx)
    if n < 2 * min_leaf:
        return None
    best = None
    Xl = X[idx]
    Sl = stats[idx]
    total = Sl.sum(axis=0)
    for f in range(X.shape[1]):
        order = np.argsort(Xl[:, f], kind="stable")
        xs = Xl[order, f]
        cum = np.cumsum(Sl[order], axis=0)
        # candidate boundaries between consecutive distinct values
        pos = np.arange(n - 1)
        valid = (xs[:-1] < xs[1:]) & (pos + 1 >= min_leaf) & (n - pos - 1 >= min_leaf)
        if not valid.any():
            continue
        gains = gain_fn(cum[:-1][valid], total)
        j = int(np.argmax(gains))
        gain = float(gains[j])
        if gain <= _GAIN_TOL:
            continue
        i = pos[valid][j]
        thr = float((xs[i] + xs[i + 1]) / 2.0)
        if best is None or gain > best[0]:
            best = (gain, f, thr)
    return best


def _grow(X, stats, config: GrowthConfig, gain_fn, leaf_value_fn) -> Tree:
    grower = _Grower(X.shape[1])
    all_idx = np.arange(len(X))
    root = grower.add_leaf(leaf_value_fn(stats[all_idx].sum(axis=0)))
    members = {root: all_idx}
    candidates = {root: _best_split(X, stats, all_idx, config.min_leaf, gain_fn)}
    n_leaves = 1
    while n_leaves < config.max_leaves:
        # greedy leaf-wise step: split the leaf with the largest gain
        node, cand = None, None
        for nid, c in candidates.items():
            if c is not None and (cand is None or c[0] > cand[0]):
                node, cand = nid, c
        if node is None:
            break
        _, f, thr = cand
        idx = members.pop(node)
        del candidates[node]
        mask = X[idx, f] < thr
        left_idx, right_idx = idx[mask], idx[~mask]
        lid = grower.add_leaf(leaf_value_fn(stats[left_idx].sum(axis=0)))
        rid = grower.add_leaf(leaf_value_fn(stats[right_idx].sum(axis=0)))
        grower.make_internal(node, f, thr, lid, rid)
        members[lid], members[rid] = left_idx, right_idx
        candidates[lid] = _best_split(X, stats, left_idx, config.min_leaf, gain_fn)
        candidates[rid] = _best_split(X, stats, right_idx, config.min_leaf, gain_fn)
        n_leaves += 1
    return grower.build()


def fit_classification_tree(data: Dataset, weights, config: GrowthConfig) -> Tree:
    """Weighted-Gini classification tree; leaves predict the weighted-majority
    label in {-1, +1} (ties go to +1)."""
    if config.mode != MODE_CLASSIFICATION:
        raise InvalidParamsError("config.mode must be weighted_classification")
    if data.m == 0:
        raise EmptyDataError("empty dataset")
    w = np.asarray(weights, dtype=np.float64)
    if len(w) != data.m:
        raise DimensionMismatchError("weights length must match sample count")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidParamsError("weights must be a distribution")

    # per-sample stat columns: (weight on +1, weight on -1)
    stats = np.zeros((data.m, 2))
    stats[:, 0] = np.where(data.y == 1, w, 0.0)
    stats[:, 1] = np.where(data.y == -1, w, 0.0)

    def gini_score(tot):
        # weighted impurity W * (1 - (Wp/W)^2 - (Wn/W)^2) = W - (Wp^2+Wn^2)/W
        W = tot[..., 0] + tot[..., 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = W - (tot[..., 0] ** 2 + tot[..., 1] ** 2) / W
        return np.where(W > 0, s, 0.0)

    def gain_fn(cum_left, total):
        return gini_score(total) - gini_score(cum_left) - gini_score(total - cum_left)

    def leaf_value_fn(tot):
        return 1.0 if tot[0] >= tot[1] else -1.0

    return _grow(data.X, stats, config, gain_fn, leaf_value_fn)


def fit_regression_tree(features: Dataset, grads, hess, config: GrowthConfig) -> Tree:
    """Second-order regression tree: leaf value -sum(g)/(sum(h)+lambda),
    split gain G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)."""
    if config.mode != MODE_GRADIENT:
        raise InvalidParamsError("config.mode must be gradient_newton")
    if features.m == 0:
        raise EmptyDataError("empty dataset")
    g = np.asarray(grads, dtype=np.float64)
    h = np.asarray(hess, dtype=np.float64)
    if len(g) != features.m or len(h) != features.m:
        raise DimensionMismatchError("grads/hess length must match sample count")
    if np.any(h <= 0):
        raise InvalidParamsError("hessians must be strictly positive")
    lam = config.lambda_l2
    stats = np.column_stack([g, h])

    def score(tot):
        return tot[..., 0] ** 2 / (tot[..., 1] + lam)

    def gain_fn(cum_left, total):
        return score(cum_left) + score(total - cum_left) - score(total)

    def leaf_value_fn(tot):
        return -tot[0] / (tot[1] + lam)

    return _grow(features.X, stats, config, gain_fn, leaf_value_fn)


def tree_from_cells(breaks, values, n_features: int = 1, feature: int = 0) -> Tree:
    """Piecewise-constant tree on one feature: values[i] applies on
    [breaks[i-1], breaks[i]), values[0] left of breaks[0], values[-1] on the
    right. Built balanced, so depth is logarithmic in the cell count."""
    breaks = list(map(float, breaks))
    values = list(map(float, values))
    if len(values) != len(breaks) + 1:
        raise InvalidParamsError("need exactly one more value than breaks")
    if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
        raise InvalidParamsError("breaks must be strictly increasing")
    grower = _Grower(n_features)

    def build(lo: int, hi: int) -> int:
        # cells values[lo..hi]; breaks[lo..hi-1] separate them
        if lo == hi:
            return grower.add_leaf(values[lo])
        mid = (lo + hi) // 2  # split at breaks[mid]
        node = grower.add_leaf(0.0)  # placeholder, becomes internal
        lid = build(lo, mid)
        rid = build(mid + 1, hi)
        grower.make_internal(node, feature, breaks[mid], lid, rid)
        return node

    build(0, len(values) - 1)
    return grower.build()
