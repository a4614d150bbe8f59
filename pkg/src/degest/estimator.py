"""Sublinear estimators for the average degree of a graph.

Three entry points, in decreasing order of prior knowledge:

* :func:`all_advice`       -- degree threshold tau and a degree guess d_tilde
* :func:`threshold_advice` -- tau only; geometric search recovers the guess
* :func:`no_advice`        -- nothing; doubling search recovers tau first

All three consume queries through a QueryOracle and return a
DegreeEstimate whose ``d_hat`` is an exact Fraction: the two random
building blocks (a truncated-degree mean and a light-endpoint coin
toss) both produce rationals, and the final estimate is their ratio.

The sample sizes are driven by an EstimatorConfig.  The default
constants match the analysis that backs the (epsilon, delta) guarantee;
they are deliberately conservative, and experiments at interactive
scale usually override them (see ``c_add``, ``c_mult``, ``c_mean``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .oracle import QueryCounters, QueryOracle

__all__ = [
    "EstimatorConfig",
    "EstimatorError",
    "ZeroDensityError",
    "SafetyCapError",
    "CoinTossResult",
    "MeanEstResult",
    "DegreeEstimate",
    "PATH_ALL_ADVICE",
    "PATH_THRESHOLD_FALLBACK",
    "coin_toss",
    "mean_est",
    "all_advice",
    "threshold_advice",
    "no_advice",
    "mean_budget",
    "toss_budget",
    "search_budget",
]

PATH_ALL_ADVICE = "all_advice"
PATH_THRESHOLD_FALLBACK = "threshold_fallback"

_SCALAR_MAX = 64  # below this, sampling loops stay scalar
_CHUNK = 1 << 20  # batch draw size cap


class EstimatorError(RuntimeError):
    """Estimation could not produce a value."""


class ZeroDensityError(EstimatorError):
    """Every coin toss landed on a heavy endpoint; the ratio is undefined."""


class SafetyCapError(EstimatorError):
    """The threshold doubling search exceeded its hard iteration cap."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Accuracy targets and sample-size constants.

    epsilon is the relative error target, delta the allowed failure
    probability.  The c_* constants scale the three sample-size
    formulas (doubling-search tosses, density tosses, mean samples) and
    can be lowered for quick experiments at the cost of the formal
    guarantee.
    """

    epsilon: float
    delta: float
    c_add: float = 512
    c_mult: float = 32
    c_mean: float = 576
    max_threshold_doublings: int = 64

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        for name in ("c_add", "c_mult", "c_mean"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_threshold_doublings < 1:
            raise ValueError("max_threshold_doublings must be >= 1")


@dataclass(frozen=True)
class CoinTossResult:
    rho_hat: Fraction
    tosses: int


@dataclass(frozen=True)
class MeanEstResult:
    w_hat: Fraction
    samples: int


@dataclass(frozen=True)
class DegreeEstimate:
    """Final output of an estimator run."""

    d_hat: Fraction
    tau_used: int
    d_tilde_used: Fraction | None
    path: str
    counters: QueryCounters
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "d_hat": [self.d_hat.numerator, self.d_hat.denominator],
            "tau_used": self.tau_used,
            "d_tilde_used": None
            if self.d_tilde_used is None
            else [self.d_tilde_used.numerator, self.d_tilde_used.denominator],
            "path": self.path,
            "counters": self.counters.as_dict(),
            "seed": self.seed,
        }


# ------------------------------------------------------------------ budgets


def mean_budget(cfg: EstimatorConfig, tau: int, d_tilde, delta_local: float) -> int:
    """Samples for the truncated-degree mean, computed exactly."""
    num = Fraction(cfg.c_mean) * tau
    den = Fraction(delta_local) * Fraction(cfg.epsilon) ** 2 * Fraction(d_tilde)
    q = num / den
    return max(1, -(-q.numerator // q.denominator))


def toss_budget(cfg: EstimatorConfig, delta_local: float) -> int:
    """Tosses for the light-endpoint density estimate."""
    eps3 = cfg.epsilon / 3
    c = max(cfg.c_add, cfg.c_mult / (eps3 * eps3))
    return max(1, math.ceil(c * math.log(2 / delta_local)))


def search_budget(cfg: EstimatorConfig, i: int) -> int:
    """Tosses for round i of the threshold doubling search."""
    return max(1, math.ceil(cfg.c_add * ((i + 2) * math.log(2) - math.log(cfg.delta))))


# ------------------------------------------------------------------ sampling


def coin_toss(oracle: QueryOracle, tau: int, r: int) -> CoinTossResult:
    """Fraction of r random directed edges whose start has degree <= tau."""
    if r < 1:
        raise ValueError(f"toss count must be >= 1, got {r}")
    hits = 0
    if r < _SCALAR_MAX:
        for _ in range(r):
            u, _ = oracle.rand_edge()
            if oracle.degree_of(u) <= tau:
                hits += 1
    else:
        left = r
        while left:
            k = min(left, _CHUNK)
            us, _ = oracle.rand_edge_batch(k)
            ds = oracle.degree_of_batch(us)
            hits += int((ds <= tau).sum())
            left -= k
    return CoinTossResult(Fraction(hits, r), r)


def mean_est(oracle: QueryOracle, tau: int, q: int) -> MeanEstResult:
    """Mean of q truncated degree samples (degrees above tau count as 0)."""
    if q < 1:
        raise ValueError(f"sample count must be >= 1, got {q}")
    total = 0
    if q < _SCALAR_MAX:
        for _ in range(q):
            _, d = oracle.degree_random()
            if d <= tau:
                total += d
    else:
        left = q
        while left:
            k = min(left, _CHUNK)
            _, ds = oracle.degree_random_batch(k)
            total += int(ds[ds <= tau].sum())
            left -= k
    return MeanEstResult(Fraction(total, q), q)


# ---------------------------------------------------------------- estimators


def all_advice(
    oracle: QueryOracle,
    tau: int,
    d_tilde,
    cfg: EstimatorConfig,
    *,
    delta: float | None = None,
    path: str = PATH_ALL_ADVICE,
) -> DegreeEstimate:
    """Estimate the average degree given a threshold and a degree guess.

    The estimate is the ratio of a truncated-degree mean to a
    light-endpoint density; its expectation telescopes to the true
    average degree for any threshold, while the sample sizes sized from
    (tau, d_tilde, epsilon, delta) control the variance.
    """
    tau = _check_tau(tau)
    d_tilde = Fraction(d_tilde)
    if d_tilde <= 0:
        raise ValueError(f"degree guess must be positive, got {d_tilde}")
    delta_local = cfg.delta if delta is None else delta

    w = mean_est(oracle, tau, mean_budget(cfg, tau, d_tilde, delta_local))
    t = coin_toss(oracle, tau, toss_budget(cfg, delta_local))
    if t.rho_hat == 0:
        raise ZeroDensityError(
            f"no light endpoints in {t.tosses} tosses at tau={tau}"
        )
    return DegreeEstimate(
        d_hat=w.w_hat / t.rho_hat,
        tau_used=tau,
        d_tilde_used=d_tilde,
        path=path,
        counters=oracle.counters.snapshot(),
        seed=oracle.seed,
    )


def threshold_advice(
    oracle: QueryOracle,
    tau: int,
    cfg: EstimatorConfig,
    *,
    delta: float | None = None,
) -> DegreeEstimate:
    """Estimate the average degree given only a degree threshold.

    Probes geometrically decreasing degree guesses tau/2, tau/4, ...,
    accepting the first level whose repeated probes all land at or
    above it; the accepted guess then drives a fresh full-budget
    estimate.  If every level rejects, a final run uses the guess
    tau / 2^(L+1), below the smallest probed level.
    """
    tau = _check_tau(tau)
    delta_local = cfg.delta if delta is None else delta
    levels = (tau - 1).bit_length()  # probes at tau/2 .. tau/2^levels
    if levels:
        reps = max(1, math.ceil(math.log2((levels + 1) ** 2 / delta_local)))
        delta_inner = delta_local / (levels + 1) ** 2
        for i in range(1, levels + 1):
            d_tilde = Fraction(tau, 2**i)
            d_min = None
            for _ in range(reps):
                try:
                    probe = all_advice(
                        oracle, tau, d_tilde, cfg, delta=delta_inner
                    ).d_hat
                except ZeroDensityError:
                    probe = Fraction(0)
                if d_min is None or probe < d_min:
                    d_min = probe
            if d_min >= d_tilde:
                return all_advice(oracle, tau, d_tilde, cfg, delta=delta_local / 2)
    return all_advice(
        oracle,
        tau,
        Fraction(tau, 2 ** (levels + 1)),
        cfg,
        delta=delta_local / 2,
        path=PATH_THRESHOLD_FALLBACK,
    )


def no_advice(oracle: QueryOracle, cfg: EstimatorConfig) -> DegreeEstimate:
    """Estimate the average degree with no prior knowledge.

    Doubles a candidate threshold until the light-endpoint density
    clears 5/16, then hands over to :func:`threshold_advice` with the
    remaining failure budget.
    """
    for i in range(cfg.max_threshold_doublings + 1):
        tau = 2**i
        t = coin_toss(oracle, tau, search_budget(cfg, i))
        if t.rho_hat >= Fraction(5, 16):
            return threshold_advice(oracle, tau, cfg, delta=cfg.delta / 2)
    raise SafetyCapError(
        f"no threshold accepted after {cfg.max_threshold_doublings} doublings"
    )


def _check_tau(tau) -> int:
    if tau != int(tau) or int(tau) < 1:
        raise ValueError(f"threshold must involve an integer >= 1, got {tau}")
    return int(tau)
