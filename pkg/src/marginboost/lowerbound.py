"""Monte-Carlo and exact-arithmetic checks for the probabilistic kernels of
the lower-bound construction: uniform occupancy counts, the order-statistic
event on the d smallest bin counts, a reverse Chernoff bound verified
against the exact binomial CDF, and the Paley-Zygmund step.

Direction convention: the bin event counted by B is the lower tail
b_i <= (1-delta) * m/u, matching the reverse Chernoff bound (Pr[sum I_j <=
(1-delta)mp]); that is the direction that makes the order-statistic bound
on the d smallest counts go through.

Trials use per-trial RNG streams derived from (seed, trial index), so the
results are independent of any parallel execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DeltaOutOfRangeError, EmptyInputError, InvalidParamsError, ParamsOutOfRegimeError


@dataclass(frozen=True)
class LBParams:
    u: int  # bin count
    d: int  # subset size
    m: int  # samples per trial
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.d <= self.u:
            raise InvalidParamsError("need 1 <= d <= u")
        if self.m < 1 or self.trials < 1:
            raise InvalidParamsError("m and trials must be >= 1")


@dataclass(frozen=True)
class LBTrial:
    counts: np.ndarray  # occupancy b_1..b_u, sums to m
    smallest_d_sum: int  # sum of the d smallest counts
    event_orderstat: bool  # smallest_d_sum <= d*(m/u)*(1-delta)
    b_small: int  # number of bins with b_i <= (1-delta)*m/u


@dataclass(frozen=True)
class LBReport:
    delta: float
    threshold: float
    empirical_frequency: float
    required_frequency: float
    std_error: float
    passed: bool


def order_stat_delta(u: int, d: int, m: int) -> float:
    """delta = sqrt(ln(u/2d) / (9m/u)); requires u > 2d."""
    if u <= 2 * d:
        raise ParamsOutOfRegimeError("need u > 2d for a positive delta")
    return math.sqrt(math.log(u / (2.0 * d)) / (9.0 * m / u))


def simulate_occupancy(params: LBParams, delta: float | None = None) -> list[LBTrial]:
    """Each trial drops m i.i.d. uniform balls into u bins and records the
    occupancy statistics. Deterministic given the seed."""
    if delta is None:
        delta = order_stat_delta(params.u, params.d, params.m)
    bin_threshold = (1.0 - delta) * params.m / params.u
    sum_threshold = params.d * bin_threshold
    probs = np.full(params.u, 1.0 / params.u)
    trials = []
    for t in range(params.trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((params.seed, t))))
        counts = rng.multinomial(params.m, probs)
        sorted_counts = np.sort(counts)
        smallest = int(sorted_counts[: params.d].sum())
        trials.append(
            LBTrial(
                counts=counts,
                smallest_d_sum=smallest,
                event_orderstat=smallest <= sum_threshold,
                b_small=int(np.count_nonzero(counts <= bin_threshold)),
            )
        )
    return trials


def verify_order_stat_bound(params: LBParams) -> LBReport:
    """Empirical frequency of sum of d smallest counts <= d*(m/u)*(1-delta),
    compared against the target frequency of 1/50."""
    delta = order_stat_delta(params.u, params.d, params.m)
    if delta > 0.5:
        raise ParamsOutOfRegimeError(f"delta = {delta:.4f} > 1/2")
    trials = simulate_occupancy(params, delta)
    freq = float(np.mean([t.event_orderstat for t in trials]))
    required = 1.0 / 50.0
    return LBReport(
        delta=delta,
        threshold=params.d * (1.0 - delta) * params.m / params.u,
        empirical_frequency=freq,
        required_frequency=required,
        std_error=math.sqrt(max(freq * (1 - freq), 1e-12) / params.trials),
        passed=freq >= required,
    )


def binomial_lower_tail(m: int, p: float, k: int) -> float:
    """Exact Pr[Bin(m,p) <= k] via a log-term recurrence summed
    smallest-first (ascending j for a lower tail below the mean)."""
    if k < 0:
        return 0.0
    if k >= m:
        return 1.0
    log_terms = np.empty(k + 1)
    lp, lq = math.log(p), math.log1p(-p)
    for j in range(k + 1):
        log_terms[j] = (
            math.lgamma(m + 1) - math.lgamma(j + 1) - math.lgamma(m - j + 1) + j * lp + (m - j) * lq
        )
    # stable sum: accumulate the smallest terms first
    return float(np.exp(np.sort(log_terms)).sum())


def reverse_chernoff_check(m: int, u: int, delta: float) -> tuple[float, float, bool]:
    """Exact binomial lower tail Pr[Bin(m,1/u) <= floor((1-delta)m/u)]
    against the claimed floor e^{-9 m delta^2 / u}."""
    lower = math.sqrt(3.0 / (m / u))
    if not lower <= delta <= 0.5:
        raise DeltaOutOfRangeError(
            f"delta must lie in [sqrt(3/(m/u)), 1/2] = [{lower:.4f}, 0.5], got {delta}"
        )
    k = math.floor((1.0 - delta) * m / u)
    lhs = binomial_lower_tail(m, 1.0 / u, k)
    rhs = math.exp(-9.0 * m * delta**2 / u)
    return lhs, rhs, lhs >= rhs


def paley_zygmund_check(params: LBParams, delta: float) -> tuple[float, float, bool]:
    """Empirical Pr[B >= E[B]/2] against the Paley-Zygmund floor
    E[B]^2 / (4 E[B^2]), with 3-sigma Monte-Carlo slack; when E[B] >= 2d the
    additional 1/8 floor is checked as well."""
    trials = simulate_occupancy(params, delta)
    b = np.array([t.b_small for t in trials], dtype=np.float64)
    eb = float(b.mean())
    eb2 = float((b**2).mean())
    lhs = float(np.mean(b >= eb / 2.0))
    rhs = eb**2 / (4.0 * eb2) if eb2 > 0 else 0.0
    sigma = 0.5 / math.sqrt(params.trials)
    passed = lhs >= rhs - 3.0 * sigma
    if eb >= 2 * params.d:
        passed = passed and lhs >= 1.0 / 8.0 - 3.0 * sigma
    return lhs, rhs, passed


def uniform_loss_identity(f_values) -> float:
    """Fraction of strictly negative entries: the out-of-sample error under
    the uniform distribution on u points."""
    v = np.asarray(f_values, dtype=np.float64)
    if len(v) == 0:
        raise EmptyInputError("need at least one value")
    return float(np.mean(v < 0))
