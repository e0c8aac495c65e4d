"""Normalized voting classifiers.

A raw boosted ensemble F(x) = sum_t alpha_t * tree_t(x) is rescaled into a
convex vote: each tree's outputs are divided by its largest absolute leaf
value, the coefficient picks that factor up, and all coefficients are then
divided by their sum Z. The decision function is unchanged (f = F/Z) and
every normalized hypothesis maps into [-1, 1] with max |output| = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DimensionMismatchError, EmptyEnsembleError, InvalidParamsError
from .trees import Tree


@dataclass(frozen=True)
class BaseHypothesis:
    tree: Tree
    scale: float  # divisor applied to the tree's raw outputs

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict(X) / self.scale


@dataclass(frozen=True)
class VotingClassifier:
    """Convex combination of base hypotheses; weights are the distribution
    Q(f) over base learners."""

    hypotheses: tuple[BaseHypothesis, ...]
    weights: np.ndarray  # nonneg, sums to 1
    scale_total: float  # Z = sum_t alpha_t * scale_t; raw score = Z * f

    def __post_init__(self):
        if len(self.hypotheses) == 0:
            raise EmptyEnsembleError("classifier needs at least one hypothesis")
        w = np.asarray(self.weights, dtype=np.float64)
        if len(w) != len(self.hypotheses):
            raise InvalidParamsError("weights and hypotheses must align")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidParamsError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        w.setflags(write=False)

    @property
    def n_features(self) -> int:
        return self.hypotheses[0].tree.n_features

    def predictions_matrix(self, X: np.ndarray) -> np.ndarray:
        """Normalized base-learner outputs, shape (n_hypotheses, n_samples)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatchError(
                f"expected (*, {self.n_features}) features, got {X.shape}"
            )
        return np.stack([h.predict(X) for h in self.hypotheses])

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        return self.weights @ self.predictions_matrix(X)

    def to_dict(self, algo: str = "custom") -> dict:
        return {
            "algo": algo,
            "scale_total": float(self.scale_total),
            "weights": [float(w) for w in self.weights],
            "hypotheses": [
                {"scale": float(h.scale), "tree": h.tree.to_dict()}
                for h in self.hypotheses
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VotingClassifier":
        hyps = tuple(
            BaseHypothesis(tree=Tree.from_dict(h["tree"]), scale=float(h["scale"]))
            for h in doc["hypotheses"]
        )
        return cls(hyps, np.array(doc["weights"], dtype=np.float64), float(doc["scale_total"]))


def normalize(raw) -> VotingClassifier:
    """Rescale a RawEnsemble into a voting classifier. A constant-zero tree
    gets scale 1 by convention."""
    if len(raw.trees) == 0:
        raise EmptyEnsembleError("cannot normalize an empty ensemble")
    alphas = np.asarray(raw.coefficients, dtype=np.float64)
    if np.any(alphas <= 0):
        raise InvalidParamsError("coefficients must all be positive")
    scales = []
    for tree in raw.trees:
        lo, hi = tree.output_range
        scale = max(abs(lo), abs(hi))
        scales.append(scale if scale > 0 else 1.0)
    scales = np.array(scales)
    scaled = alphas * scales
    Z = float(scaled.sum())
    weights = scaled / Z
    hyps = tuple(BaseHypothesis(tree=t, scale=float(s)) for t, s in zip(raw.trees, scales))
    return VotingClassifier(hypotheses=hyps, weights=weights, scale_total=Z)


def score(f: VotingClassifier, features) -> float:
    """Weighted vote at one point; guaranteed in [-1, 1]."""
    x = np.asarray(features, dtype=np.float64).reshape(1, -1)
    return float(f.score_batch(x)[0])


def margins(f: VotingClassifier, data: Dataset) -> np.ndarray:
    """Per-sample y * f(x), in data order (unsorted)."""
    return data.y * f.score_batch(data.X)


def delta_second_moment(f: VotingClassifier, features) -> float:
    """E_{h~Q(f)}[(f(x) - h(x))^2] at one point."""
    x = np.asarray(features, dtype=np.float64).reshape(1, -1)
    return float(delta_second_moments(f, x)[0])


def delta_second_moments(f: VotingClassifier, X: np.ndarray) -> np.ndarray:
    """Per-point E_{h~Q(f)}[(f(x) - h(x))^2] over rows of X."""
    H = f.predictions_matrix(X)
    fx = f.weights @ H
    return f.weights @ (H - fx) ** 2
