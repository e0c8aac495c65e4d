"""Ensemble training: discrete AdaBoost and a leaf-wise Newton gradient
booster with logistic loss.

AdaBoost uses weighted-Gini classification trees with +-1 leaves; the
gradient booster fits second-order regression trees on the logistic
gradients g_i = -y_i / (1 + e^{y_i F}) and hessians h_i = s(1-s) with
s = 1/(1 + e^{y_i F}). Both are fully deterministic given data and config.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InvalidParamsError, StageOutOfRangeError
from .trees import (
    MODE_CLASSIFICATION,
    MODE_GRADIENT,
    GrowthConfig,
    Tree,
    fit_classification_tree,
    fit_regression_tree,
)

EPS_CLAMP = 1e-12  # AdaBoost weighted-error clamp
LEAF_CLAMP = 10.0  # raw Newton leaf values are clipped to +-LEAF_CLAMP

ALGO_ADABOOST = "adaboost"
ALGO_GBM = "gbm"


@dataclass(frozen=True)
class BoostConfig:
    rounds: int = 200
    learning_rate: float = 0.1  # gradient booster only
    growth: GrowthConfig = field(default_factory=GrowthConfig)
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise InvalidParamsError("rounds must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise InvalidParamsError("learning_rate must lie in (0,1]")


@dataclass(frozen=True)
class RawEnsemble:
    trees: tuple[Tree, ...]
    coefficients: np.ndarray  # alpha_t > 0
    algo: str
    loss_trace: np.ndarray  # per-round training objective
    stalled: bool = False  # AdaBoost stopped early on a 0.5-error learner

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=np.float64)
        )
        object.__setattr__(self, "loss_trace", np.asarray(self.loss_trace, dtype=np.float64))

    @property
    def rounds(self) -> int:
        return len(self.trees)

    def prefix(self, t: int) -> "RawEnsemble":
        if not 1 <= t <= self.rounds:
            raise StageOutOfRangeError(f"stage {t} outside 1..{self.rounds}")
        return RawEnsemble(
            self.trees[:t], self.coefficients[:t], self.algo, self.loss_trace[:t]
        )

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(len(X))
        for alpha, tree in zip(self.coefficients, self.trees):
            total += alpha * tree.predict(X)
        return total


def train_adaboost(train: Dataset, config: BoostConfig) -> RawEnsemble:
    """Discrete AdaBoost. If a round's tree has weighted error >= 0.5 the
    weak learner has stalled: training returns the rounds completed so far
    with the `stalled` flag set."""
    if config.growth.mode != MODE_CLASSIFICATION:
        raise InvalidParamsError("AdaBoost requires weighted_classification growth")
    m = train.m
    w = np.full(m, 1.0 / m)
    trees, alphas, loss_trace = [], [], []
    bound = 1.0
    stalled = False
    for _ in range(config.rounds):
        tree = fit_classification_tree(train, w, config.growth)
        pred = tree.predict(train.X)
        miss = pred != train.y
        eps = float(w[miss].sum())
        if eps >= 0.5:
            stalled = True
            break
        eps_c = min(max(eps, EPS_CLAMP), 1.0 - EPS_CLAMP)
        alpha = 0.5 * np.log((1.0 - eps_c) / eps_c)
        trees.append(tree)
        alphas.append(alpha)
        w = w * np.exp(-alpha * train.y * pred)
        w /= w.sum()
        bound *= 2.0 * np.sqrt(eps_c * (1.0 - eps_c))
        loss_trace.append(bound)
    return RawEnsemble(tuple(trees), np.array(alphas), ALGO_ADABOOST, np.array(loss_trace), stalled)


def train_gradient_booster(train: Dataset, config: BoostConfig) -> RawEnsemble:
    """Leaf-wise Newton gradient booster with logistic loss ln(1+e^{-yF});
    every tree enters with coefficient equal to the learning rate."""
    if config.growth.mode != MODE_GRADIENT:
        raise InvalidParamsError("gradient booster requires gradient_newton growth")
    m = train.m
    lr = config.learning_rate
    F = np.zeros(m)
    trees, loss_trace = [], []
    for _ in range(config.rounds):
        s = _sigmoid(-train.y * F)  # 1 / (1 + e^{yF})
        g = -train.y * s
        h = s * (1.0 - s)
        tree = fit_regression_tree(train, g, h, config.growth)
        tree = _clamp_leaves(tree)
        trees.append(tree)
        F = F + lr * tree.predict(train.X)
        loss_trace.append(float(np.mean(np.logaddexp(0.0, -train.y * F))))
    coeffs = np.full(len(trees), lr)
    return RawEnsemble(tuple(trees), coeffs, ALGO_GBM, np.array(loss_trace))


def staged_snapshots(ensemble: RawEnsemble, train: Dataset, stages):
    """Margin profile of the normalized length-t prefix for each stage t."""
    from .bounds import MarginProfile
    from .ensemble import margins, normalize

    profiles = []
    for t in stages:
        f = normalize(ensemble.prefix(int(t)))
        profiles.append(MarginProfile.from_values(margins(f, train)))
    return profiles


def error_trace(ensemble: RawEnsemble, data: Dataset) -> np.ndarray:
    """0-1 error of sign(prefix ensemble) on `data` after each round.

    The raw prefix sign equals the normalized sign, so no rescaling is
    needed per round."""
    F = np.zeros(data.m)
    errs = np.empty(ensemble.rounds)
    for t, (alpha, tree) in enumerate(zip(ensemble.coefficients, ensemble.trees)):
        F += alpha * tree.predict(data.X)
        errs[t] = np.mean(np.where(F >= 0, 1, -1) != data.y)
    return errs


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, 1e-16, 1.0 - 1e-16)


def _clamp_leaves(tree: Tree) -> Tree:
    vals = tree.value
    leaves = tree.is_leaf
    if np.all(np.abs(vals[leaves]) <= LEAF_CLAMP):
        return tree
    clipped = vals.copy()
    clipped[leaves] = np.clip(vals[leaves], -LEAF_CLAMP, LEAF_CLAMP)
    return Tree(tree.feature, tree.threshold, tree.left, tree.right, clipped, tree.n_features)
