"""Tabular binary-classification data: CSV loading, splitting, synthetic generators.

Labels are always mapped to {-1, +1}. Datasets are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParamsError,
    InvalidThetaError,
    MissingColumnError,
    NonBinaryLabelsError,
    ParseError,
    TooFewSamplesError,
)


@dataclass(frozen=True)
class Dataset:
    """A set of m samples with real features and labels in {-1, +1}."""

    X: np.ndarray  # shape (m, d), float64
    y: np.ndarray  # shape (m,), values in {-1, +1}
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise InvalidParamsError("features must be a 2-d array")
        if len(y) != len(X):
            raise InvalidParamsError("feature/label length mismatch")
        if len(X) < 1:
            raise InvalidParamsError("dataset needs at least one sample")
        if not np.all(np.isin(y, (-1, 1))):
            raise NonBinaryLabelsError("labels must be in {-1, +1}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        X.setflags(write=False)
        y.setflags(write=False)
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", tuple(f"f{i}" for i in range(X.shape[1]))
            )

    @property
    def m(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx].copy(), self.y[idx].copy(), self.feature_names)


@dataclass(frozen=True)
class SplitSpec:
    """Random train/test split; defaults to a half/half partition."""

    seed: int
    fraction: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise InvalidParamsError("split fraction must lie in (0,1)")


def load_csv(path, label_column: str, positive_label: str) -> Dataset:
    """Load a header-first CSV; `positive_label` maps to +1, the other value to -1.

    Raises MissingColumnError, NonBinaryLabelsError, or ParseError (with row
    and column indices) on malformed input.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", row=0) from None
        if label_column not in header:
            raise MissingColumnError(f"label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        feature_names = tuple(n for i, n in enumerate(header) if i != label_idx)

        rows, labels = [], []
        for r, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise ParseError(f"row {r} has {len(row)} fields, expected {len(header)}", row=r)
            labels.append(row[label_idx])
            feats = []
            for c, cell in enumerate(row):
                if c == label_idx:
                    continue
                try:
                    feats.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"non-numeric feature {cell!r} at row {r}, column {c}",
                        row=r,
                        column=c,
                    ) from None
            rows.append(feats)

    if not rows:
        raise ParseError("file contains a header but no samples", row=1)
    distinct = sorted(set(labels))
    if len(distinct) != 2:
        raise NonBinaryLabelsError(f"expected exactly two label values, got {distinct}")
    if positive_label not in distinct:
        raise NonBinaryLabelsError(
            f"positive label {positive_label!r} not among observed labels {distinct}"
        )
    y = np.array([1 if v == positive_label else -1 for v in labels], dtype=np.int64)
    return Dataset(np.array(rows, dtype=np.float64), y, feature_names)


def split_train_test(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint random partition into ceil(fraction*m) train and the rest test.

    Uses numpy's PCG64 generator seeded with `spec.seed`, so partitions are
    reproducible across platforms.
    """
    if data.m < 2:
        raise TooFewSamplesError("need at least 2 samples to split")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    perm = rng.permutation(data.m)
    n_train = int(np.ceil(spec.fraction * data.m))
    if n_train == data.m:
        raise TooFewSamplesError("split fraction leaves an empty test side")
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return data.subset(train_idx), data.subset(test_idx)


def synthetic_sparse_vote(theta: float, m: int):
    """Build the sparse-vote construction: f = sum_i theta*h_i over 1/theta
    hypotheses where each point has exactly one hypothesis outputting its
    label and all others output 0, so every margin equals theta exactly.

    If 1/theta is not an integer it is rounded and theta re-derived (a
    warning reports the adjusted value). Returns (Dataset, VotingClassifier).
    """
    from .ensemble import BaseHypothesis, VotingClassifier
    from .trees import tree_from_cells

    if not 0.0 < theta <= 1.0:
        raise InvalidThetaError(f"theta must lie in (0,1], got {theta}")
    if m < 1:
        raise InvalidParamsError("m must be >= 1")
    k = int(round(1.0 / theta))
    adjusted = 1.0 / k
    if abs(adjusted - theta) > 1e-12:
        warnings.warn(f"1/theta not integral; adjusted theta from {theta} to {adjusted}")
    theta = adjusted

    X = np.arange(m, dtype=np.float64).reshape(-1, 1)
    y = np.where(np.arange(m) % 2 == 0, 1, -1).astype(np.int64)
    data = Dataset(X, y, ("point_index",))

    hypotheses = []
    for i in range(k):
        assigned = np.arange(i, m, k)
        # piecewise-constant tree on the point index: label on assigned bins, 0 off
        breaks, values = [], []
        prev_hi = None
        for p in assigned:
            lo, hi = p - 0.5, p + 0.5
            if prev_hi is not None and lo > prev_hi:
                breaks.append(lo)
                values.append(0.0)
            elif prev_hi is None:
                breaks.append(lo)
                values.append(0.0)
            breaks.append(hi)
            values.append(float(y[p]))
            prev_hi = hi
        values.append(0.0)  # right of the last break
        tree = tree_from_cells(breaks, values, n_features=1)
        hypotheses.append(BaseHypothesis(tree=tree, scale=1.0))

    weights = np.full(k, theta, dtype=np.float64)
    clf = VotingClassifier(hypotheses=tuple(hypotheses), weights=weights, scale_total=1.0)
    return data, clf


def synthetic_two_class(n: int, dim: int, separation: float, seed: int) -> Dataset:
    """Two unit-variance Gaussian clusters at +-separation/2 on the first
    coordinate, balanced labels, deterministic given seed."""
    if n < 2 or dim < 1:
        raise InvalidParamsError("need n >= 2 and dim >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    n_pos = n // 2
    n_neg = n - n_pos
    X = rng.standard_normal((n, dim))
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n_neg, dtype=np.int64)])
    X[:, 0] += separation / 2.0 * y
    return Dataset(X, y)
