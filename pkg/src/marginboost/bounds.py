"""Margin-based generalization diagnostics.

Covers the empirical margin loss, sorted margin curves, theta^{-2} and
penalty-N curves, the moment statistic
  (E_S[E_{h~Q}[Delta(x,h)^2]^{r/2}])^{2/r},
its full explicit-constant variant, the explicit-constant net bounds, and
base-learner prediction histograms. lg denotes log base 2 throughout.

Two moment exponents are reported side by side where relevant: r = lg(m)
(table parity) and r = lg(16m) (theorem parity); the literature uses both
and we surface the discrepancy rather than resolving it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .ensemble import VotingClassifier, delta_second_moments
from .errors import (
    BadBinsError,
    EmptyProfileError,
    InvalidExponentError,
    InvalidParamsError,
    InvalidQuantileError,
    NonpositiveThetaError,
)


@dataclass(frozen=True)
class MarginProfile:
    """Sorted per-sample margins of a classifier on a sample set."""

    sorted_margins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.sorted_margins, dtype=np.float64)
        if len(arr) == 0:
            raise EmptyProfileError("margin profile cannot be empty")
        if np.any(np.diff(arr) < 0):
            raise InvalidParamsError("margins must be sorted nondecreasing")
        object.__setattr__(self, "sorted_margins", arr)
        arr.setflags(write=False)

    @classmethod
    def from_values(cls, values) -> "MarginProfile":
        return cls(np.sort(np.asarray(values, dtype=np.float64)))

    @property
    def m(self) -> int:
        return len(self.sorted_margins)


@dataclass(frozen=True)
class MomentReport:
    per_point_sq: np.ndarray  # E_{h~Q}[Delta^2] per training point
    exponent_r: float
    moment: float
    theta: float
    capital_n: float


@dataclass(frozen=True)
class PenaltyCurve:
    """Quantile-indexed penalty values; `penalty` is None where theta <= 0
    (undefined marker, kept so curves align across classifiers)."""

    points: tuple  # of (p, theta_p, penalty-or-None)
    kind: str  # "theta_squared" or "capital_N"


@dataclass(frozen=True)
class BoundQuery:
    m: int
    lg_h: float  # lg of the hypothesis-class size (explicit input)
    delta: float
    n_net: int
    loss_at_level: float

    def __post_init__(self):
        if self.m < 1 or self.n_net < 1 or self.lg_h <= 0:
            raise InvalidParamsError("m, n_net and lg_h must be positive")
        if not 0.0 < self.delta < 1.0:
            raise InvalidParamsError("delta must lie in (0,1)")
        if not 0.0 <= self.loss_at_level <= 1.0:
            raise InvalidParamsError("loss_at_level must lie in [0,1]")


def margin_loss(profile: MarginProfile, theta: float) -> float:
    """Fraction of margins strictly below theta."""
    return float(np.searchsorted(profile.sorted_margins, theta, side="left")) / profile.m


def theta_at_quantile(profile: MarginProfile, p: float) -> float:
    """The k'th smallest margin with k = max(1, ceil(p*m))."""
    if not 0.0 < p <= 1.0:
        raise InvalidQuantileError(f"quantile must lie in (0,1], got {p}")
    k = max(1, math.ceil(p * profile.m))
    return float(profile.sorted_margins[k - 1])


def penalty_curve_theta2(profile: MarginProfile, grid) -> PenaltyCurve:
    points = []
    for p in grid:
        theta_p = theta_at_quantile(profile, p)
        penalty = theta_p ** -2 if theta_p > 0 else None
        points.append((float(p), theta_p, penalty))
    return PenaltyCurve(points=tuple(points), kind="theta_squared")


def penalty_curve_capital_n(profile: MarginProfile, moment: float, grid) -> PenaltyCurve:
    """Penalty N = max(theta^{-2} * moment, theta^{-1}) along the margin
    quantiles; the moment statistic does not depend on theta."""
    points = []
    for p in grid:
        theta_p = theta_at_quantile(profile, p)
        penalty = capital_n(moment, theta_p) if theta_p > 0 else None
        points.append((float(p), theta_p, penalty))
    return PenaltyCurve(points=tuple(points), kind="capital_N")


def moment_statistic(per_point_sq, r: float) -> float:
    """(mean of v^{r/2} over points)^{2/r} for v = E_{h~Q}[Delta^2]."""
    if r < 2:
        raise InvalidExponentError(f"exponent must be >= 2, got {r}")
    v = np.asarray(per_point_sq, dtype=np.float64)
    if np.any(v < 0) or np.any(v > 4):
        raise InvalidParamsError("per-point second moments must lie in [0,4]")
    return float(np.mean(v ** (r / 2.0)) ** (2.0 / r))


def capital_n(moment: float, theta: float) -> float:
    """Penalty N = max(theta^{-2} * moment, theta^{-1})."""
    if theta <= 0:
        raise NonpositiveThetaError(f"theta must be positive, got {theta}")
    if not 0.0 <= moment <= 4.0:
        raise InvalidParamsError("moment must lie in [0,4]")
    return max(moment / theta**2, 1.0 / theta)


def capital_n_full(f: VotingClassifier, data: Dataset, theta: float) -> float:
    """Explicit-constant penalty:
    lg(16m) * max{256/theta * ||Delta||_{lg(16m)}, 100/theta,
                  128e/theta^2 * (E_S[E_Q[Delta^2]^{lg(16m)/2}])^{2/lg(16m)}}
    with the Delta-norm taken over the joint draw (x,y)~S, h~Q."""
    if theta <= 0:
        raise NonpositiveThetaError(f"theta must be positive, got {theta}")
    m = data.m
    r = math.log2(16 * m)
    H = f.predictions_matrix(data.X)
    fx = f.weights @ H
    delta = np.abs(H - fx)  # (n_hyp, m)
    joint_norm = float((f.weights @ np.mean(delta**r, axis=1)) ** (1.0 / r))
    mom = float(np.mean((f.weights @ delta**2) ** (r / 2.0)) ** (2.0 / r))
    return r * max(256.0 / theta * joint_norm, 100.0 / theta, 128.0 * math.e / theta**2 * mom)


def moment_report(f: VotingClassifier, data: Dataset, theta: float) -> MomentReport:
    per_point = delta_second_moments(f, data.X)
    r = math.log2(16 * data.m)
    mom = moment_statistic(per_point, r)
    return MomentReport(
        per_point_sq=per_point,
        exponent_r=r,
        moment=mom,
        theta=theta,
        capital_n=capital_n(mom, theta),
    )


def net_bound_explicit(q: BoundQuery) -> tuple[float, float]:
    """Additive penalties of the net event at one level: the generalization
    term and the approximation term. All |H|^N factors are handled in
    log-space."""
    # ln(N (N+1)^2 |H|^N) with |H| = 2^lg_h
    log_net = math.log(q.n_net) + 2.0 * math.log(q.n_net + 1) + q.n_net * q.lg_h * math.log(2.0)
    gen = 8.0 * (math.log(2.0 / q.delta) + log_net) / q.m
    gen += 4.0 * math.sqrt(
        (log_net + math.log(1.0 / q.delta)) / q.m * q.loss_at_level
    )
    approx = 8.0 * (math.log(4.0 / q.delta) + log_net) / q.m
    return gen, approx


def prediction_histogram(f: VotingClassifier, data: Dataset, bin_edges):
    """Counts of normalized base-learner outputs h(x) over all
    (hypothesis, training point) pairs. Bins are left-closed with the last
    bin right-closed. Also returns the fraction of |prediction| >= 0.95."""
    edges = np.asarray(bin_edges, dtype=np.float64)
    if len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise BadBinsError("bin edges must be strictly increasing")
    if edges[0] > -1.0 or edges[-1] < 1.0:
        raise BadBinsError("bin edges must cover [-1, 1]")
    preds = f.predictions_matrix(data.X).ravel()
    counts, _ = np.histogram(preds, bins=edges)
    large_fraction = float(np.mean(np.abs(preds) >= 0.95))
    return counts, large_fraction


def table_report(f: VotingClassifier, train: Dataset, test: Dataset) -> dict:
    """Train/test 0-1 error, mean training margin, tree depth summary, and
    the moment statistic under both exponent conventions."""
    if train.n_features != test.n_features or train.n_features != f.n_features:
        raise InvalidParamsError("classifier and datasets must share a feature space")
    train_scores = f.score_batch(train.X)
    test_scores = f.score_batch(test.X)
    train_err = float(np.mean(np.where(train_scores >= 0, 1, -1) != train.y))
    test_err = float(np.mean(np.where(test_scores >= 0, 1, -1) != test.y))
    margins = train.y * train_scores
    depths = np.array([h.tree.depth for h in f.hypotheses], dtype=np.float64)
    per_point = delta_second_moments(f, train.X)
    m = train.m
    return {
        "train_error": train_err,
        "test_error": test_err,
        "mean_margin": float(margins.mean()),
        "max_depth": float(depths.max()),
        "mean_depth": float(depths.mean()),
        "moment_lg_m": moment_statistic(per_point, math.log2(m)),
        "moment_lg_16m": moment_statistic(per_point, math.log2(16 * m)),
    }
