"""Boosting toolkit with margin-based generalization diagnostics and a
Monte-Carlo verifier for the lower-bound construction's probabilistic
kernels."""

from .dataset import Dataset, SplitSpec, load_csv, split_train_test
from .ensemble import VotingClassifier, normalize
from .trees import GrowthConfig, Tree

__all__ = [
    "Dataset",
    "SplitSpec",
    "load_csv",
    "split_train_test",
    "VotingClassifier",
    "normalize",
    "GrowthConfig",
    "Tree",
]
