"""Empirical validation harness: trial batches, sweeps, lemma checks.

This module turns the estimators into experiments:

* :func:`run_trials` -- many independent estimator runs on one graph,
  each with its own recorded seed, scored against exact ground truth.
* :func:`sweep_alpha` / :func:`sweep_epsilon` -- query-cost scaling
  measurements over instance families, with log-log slope fits.
* :func:`lemma_checks` -- statistical checks of the building blocks
  (coin-toss mean, truncated mean and its variance bound, threshold
  classifier error rate) against exactly computed moments.

All scoring is exact: estimates are Fractions, the success band
(1 +/- epsilon) * d is evaluated in rational arithmetic using the exact
binary value of epsilon, and CSV/JSON outputs contain only integers and
strings where determinism matters.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .estimator import (
    EstimatorConfig,
    EstimatorError,
    SafetyCapError,
    ZeroDensityError,
    all_advice,
    coin_toss,
    mean_budget,
    mean_est,
    no_advice,
    threshold_advice,
    toss_budget,
)
from .generators import InfeasibleParameterError, gen_heavy_core
from .graph import Graph, GroundTruth, partition_by_threshold
from .oracle import QueryCounters, QueryOracle

__all__ = [
    "in_band",
    "TrialRecord",
    "TrialBatchReport",
    "run_trials",
    "write_trials_csv",
    "write_summary_json",
    "ScalingPoint",
    "ScalingReport",
    "sweep_alpha",
    "sweep_epsilon",
    "LemmaCheck",
    "lemma_checks",
]

CSV_COLUMNS = [
    "instance_id",
    "seed",
    "d_hat_num",
    "d_hat_den",
    "success",
    "tau_used",
    "degree_random",
    "degree_of",
    "rand_edge",
    "path",
]


def in_band(d_hat: Fraction, d_true: Fraction, epsilon: float) -> bool:
    """Exact test of (1 - eps) * d <= d_hat <= (1 + eps) * d."""
    eps = Fraction(epsilon)
    return (1 - eps) * d_true <= d_hat <= (1 + eps) * d_true


@dataclass(frozen=True)
class TrialRecord:
    instance_id: str
    seed: int
    d_hat: Fraction | None
    success: bool
    tau_used: int | None
    path: str
    counters: QueryCounters


@dataclass(frozen=True)
class TrialBatchReport:
    instance_id: str
    algorithm: str
    epsilon: float
    delta: float
    d_true: Fraction
    records: list

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def successes(self) -> int:
        return sum(1 for r in self.records if r.success)

    @property
    def errors(self) -> int:
        return sum(1 for r in self.records if r.d_hat is None)

    @property
    def success_rate(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    def mean_degree_queries(self) -> float:
        return float(
            np.mean([r.counters.total_degree() for r in self.records])
        )

    def mean_rand_edge(self) -> float:
        return float(np.mean([r.counters.rand_edge for r in self.records]))

    def to_json_dict(self) -> dict:
        paths = {}
        for r in self.records:
            paths[r.path] = paths.get(r.path, 0) + 1
        return {
            "instance_id": self.instance_id,
            "algorithm": self.algorithm,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "d_true": [self.d_true.numerator, self.d_true.denominator],
            "trials": self.trials,
            "successes": self.successes,
            "errors": self.errors,
            "success_rate": [
                self.success_rate.numerator,
                self.success_rate.denominator,
            ],
            "mean_degree_queries": self.mean_degree_queries(),
            "mean_rand_edge_queries": self.mean_rand_edge(),
            "paths": paths,
        }


def trial_seeds(base_seed: int, trials: int) -> list:
    """The per-trial oracle seeds: u64 words drawn from one SeedSequence.

    Recorded in every CSV row, so any single trial can be reproduced
    standalone with QueryOracle(graph, seed).
    """
    words = np.random.SeedSequence(int(base_seed)).generate_state(
        trials, np.uint64
    )
    return [int(w) for w in words]


def _run_single_trial(graph, cfg, algorithm, tau, d_tilde, seed, instance_id, d_true):
    oracle = QueryOracle(graph, seed)
    try:
        if algorithm == "no_advice":
            est = no_advice(oracle, cfg)
        elif algorithm == "threshold_advice":
            est = threshold_advice(oracle, tau, cfg)
        elif algorithm == "all_advice":
            est = all_advice(oracle, tau, d_tilde, cfg)
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    except ZeroDensityError:
        return TrialRecord(
            instance_id, seed, None, False, None, "error:zero_density",
            oracle.counters.snapshot(),
        )
    except SafetyCapError:
        return TrialRecord(
            instance_id, seed, None, False, None, "error:safety_cap",
            oracle.counters.snapshot(),
        )
    return TrialRecord(
        instance_id,
        seed,
        est.d_hat,
        in_band(est.d_hat, d_true, cfg.epsilon),
        est.tau_used,
        est.path,
        est.counters,
    )


def _trial_chunk(args):
    graph, cfg, algorithm, tau, d_tilde, seeds, instance_id, d_true = args
    return [
        _run_single_trial(graph, cfg, algorithm, tau, d_tilde, s, instance_id, d_true)
        for s in seeds
    ]


def run_trials(
    graph: Graph,
    truth: GroundTruth,
    cfg: EstimatorConfig,
    trials: int,
    base_seed: int,
    instance_id: str,
    algorithm: str = "no_advice",
    tau: int | None = None,
    d_tilde=None,
    threads: int | None = None,
) -> TrialBatchReport:
    """Run independent estimator trials and score them exactly.

    ``threads`` > 1 fans trials out over processes (default comes from
    DEGEST_THREADS, else 1); results are identical either way because
    every trial is determined by its own recorded seed.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if algorithm in ("threshold_advice", "all_advice") and tau is None:
        raise ValueError(f"{algorithm} needs tau")
    if algorithm == "all_advice" and d_tilde is None:
        raise ValueError("all_advice needs d_tilde")
    if threads is None:
        threads = int(os.environ.get("DEGEST_THREADS", "1"))
    seeds = trial_seeds(base_seed, trials)
    d_true = truth.avg_degree

    if threads <= 1 or trials == 1:
        records = _trial_chunk(
            (graph, cfg, algorithm, tau, d_tilde, seeds, instance_id, d_true)
        )
    else:
        threads = min(threads, trials)
        step = -(-trials // threads)
        chunks = [
            (graph, cfg, algorithm, tau, d_tilde, seeds[i : i + step], instance_id, d_true)
            for i in range(0, trials, step)
        ]
        records = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_trial_chunk, chunks):
                records.extend(part)

    return TrialBatchReport(
        instance_id=instance_id,
        algorithm=algorithm,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        d_true=d_true,
        records=records,
    )


def write_trials_csv(path, records) -> None:
    """One row per trial; integers and plain strings only."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            num = r.d_hat.numerator if r.d_hat is not None else ""
            den = r.d_hat.denominator if r.d_hat is not None else ""
            tau = r.tau_used if r.tau_used is not None else ""
            w.writerow(
                [
                    r.instance_id,
                    r.seed,
                    num,
                    den,
                    1 if r.success else 0,
                    tau,
                    r.counters.degree_random,
                    r.counters.degree_of,
                    r.counters.rand_edge,
                    r.path,
                ]
            )


def write_summary_json(path, payload: dict) -> None:
    import json

    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class ScalingPoint:
    x: float
    trials: int
    successes: int
    mean_degree_queries: float
    mean_rand_edge: float
    mean_tau_used: float

    def to_json_dict(self) -> dict:
        return {
            "x": self.x,
            "trials": self.trials,
            "successes": self.successes,
            "mean_degree_queries": self.mean_degree_queries,
            "mean_rand_edge": self.mean_rand_edge,
            "mean_tau_used": self.mean_tau_used,
        }


@dataclass(frozen=True)
class ScalingReport:
    sweep: str
    points: list
    exponent_raw: float
    exponent_corrected: float
    correction: str
    rand_edge_spread: float

    def to_json_dict(self) -> dict:
        return {
            "sweep": self.sweep,
            "points": [p.to_json_dict() for p in self.points],
            "exponent_raw": self.exponent_raw,
            "exponent_corrected": self.exponent_corrected,
            "correction": self.correction,
            "rand_edge_spread": self.rand_edge_spread,
        }


def _slope(xs, ys) -> float:
    return float(np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)[0])


def _point_from_report(x, rep: TrialBatchReport) -> ScalingPoint:
    taus = [r.tau_used for r in rep.records if r.tau_used is not None]
    return ScalingPoint(
        x=float(x),
        trials=rep.trials,
        successes=rep.successes,
        mean_degree_queries=rep.mean_degree_queries(),
        mean_rand_edge=rep.mean_rand_edge(),
        mean_tau_used=float(np.mean(taus)) if taus else float("nan"),
    )


def heavy_core_params_for_alpha(n: int, d, alpha: int) -> tuple:
    """Heavy-core shape (s, k, matching_edges) with arboricity alpha.

    Cliques of size 2*alpha carry about 9/10 of the fixed edge mass
    n*d/2; the matching carries the remainder, so no threshold below
    the clique degree is ever good and the smallest good power of two
    is 2*alpha.
    """
    d = Fraction(d)
    alpha = int(alpha)
    if alpha < 2:
        raise InfeasibleParameterError(f"need alpha >= 2, got {alpha}")
    total = Fraction(n) * d / 2
    if total.denominator != 1 or total <= 0:
        raise InfeasibleParameterError(f"n*d/2 must be a positive integer, got {total}")
    total = total.numerator
    s = 2 * alpha
    per_clique = s * (s - 1) // 2
    k = int(Fraction(9, 10) * total / per_clique + Fraction(1, 2))
    if k < 1:
        raise InfeasibleParameterError(f"no clique fits: n={n}, d={d}, alpha={alpha}")
    matching = total - k * per_clique
    if matching < 0:
        raise InfeasibleParameterError(
            f"clique mass overshoots total edges at alpha={alpha}"
        )
    if 4 * matching >= total:
        raise InfeasibleParameterError(
            f"matching mass {matching}/{total} reaches 1/4; threshold not pinned"
        )
    if k * s + 2 * matching > n:
        raise InfeasibleParameterError(
            f"alpha={alpha}: {k} cliques of {s} plus matching exceed n={n}"
        )
    return s, k, matching


def sweep_alpha(
    cfg: EstimatorConfig,
    n: int,
    d,
    alphas,
    trials_per_point: int,
    base_seed: int,
    threads: int | None = None,
) -> ScalingReport:
    """Query cost of the threshold estimator vs arboricity at fixed d.

    Each point is a heavy-core instance with arboricity exactly alpha
    and identical n and average degree; the estimator runs with the
    smallest good power-of-two threshold tau = 2*alpha.  The corrected
    exponent divides the degree-query cost by log2(tau)^4 before the
    log-log fit.
    """
    alphas = [int(a) for a in alphas]
    if len(alphas) < 4:
        raise ValueError(f"sweep needs at least 4 points, got {len(alphas)}")
    ss = np.random.SeedSequence(int(base_seed))
    words = ss.generate_state(2 * len(alphas), np.uint64)
    points = []
    for j, alpha in enumerate(alphas):
        s, k, matching = heavy_core_params_for_alpha(n, d, alpha)
        inst = gen_heavy_core(n, s, k, matching, seed=int(words[2 * j]))
        rep = run_trials(
            inst.graph,
            inst.truth,
            cfg,
            trials_per_point,
            base_seed=int(words[2 * j + 1]),
            instance_id=f"alpha_{alpha}",
            algorithm="threshold_advice",
            tau=2 * alpha,
            threads=threads,
        )
        points.append(_point_from_report(alpha, rep))

    xs = [math.log2(p.x) for p in points]
    raw = [math.log2(p.mean_degree_queries) for p in points]
    corr = [
        math.log2(p.mean_degree_queries / math.log2(p.mean_tau_used) ** 4)
        for p in points
    ]
    edge_means = [p.mean_rand_edge for p in points]
    return ScalingReport(
        sweep="alpha",
        points=points,
        exponent_raw=_slope(xs, raw),
        exponent_corrected=_slope(xs, corr),
        correction="log2_tau_pow4",
        rand_edge_spread=float(max(edge_means) / min(edge_means)),
    )


def sweep_epsilon(
    graph: Graph,
    truth: GroundTruth,
    cfg: EstimatorConfig,
    epsilons,
    trials_per_point: int,
    base_seed: int,
    tau: int,
    threads: int | None = None,
) -> ScalingReport:
    """Query cost of the threshold estimator vs epsilon on one instance."""
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 2:
        raise ValueError(f"sweep needs at least 2 points, got {len(epsilons)}")
    words = np.random.SeedSequence(int(base_seed)).generate_state(
        len(epsilons), np.uint64
    )
    points = []
    for j, eps in enumerate(epsilons):
        rep = run_trials(
            graph,
            truth,
            replace(cfg, epsilon=eps),
            trials_per_point,
            base_seed=int(words[j]),
            instance_id=f"eps_{eps}",
            algorithm="threshold_advice",
            tau=tau,
            threads=threads,
        )
        points.append(_point_from_report(eps, rep))
    xs = [math.log2(1 / p.x) for p in points]
    raw = [math.log2(p.mean_degree_queries) for p in points]
    edge_means = [p.mean_rand_edge for p in points]
    return ScalingReport(
        sweep="epsilon",
        points=points,
        exponent_raw=_slope(xs, raw),
        exponent_corrected=_slope(xs, raw),
        correction="none",
        rand_edge_spread=float(max(edge_means) / min(edge_means)),
    )


# ------------------------------------------------------------- lemma checks


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    applicable: bool
    observed: float
    bound: float
    details: dict

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "applicable": self.applicable,
            "observed": self.observed,
            "bound": self.bound,
            "details": self.details,
        }


def lemma_checks(
    graph: Graph,
    tau: int,
    cfg: EstimatorConfig,
    repeats: int,
    seed: int,
    classifier_delta: float = 0.01,
) -> list:
    """Check the sampling building blocks against exact moments.

    Four checks: the coin-toss mean matches rho_light, the truncated
    mean matches m_light/n, its variance respects tau * m_light / n,
    and the 5/16 threshold classifier errs on at most 2% of runs (only
    scored when rho_light is outside (1/4, 3/8), the no-guarantee gap).
    Statistical comparisons use 4-standard-error bands from exactly
    computed moments.
    """
    if graph.m == 0:
        raise ValueError("lemma checks need at least one edge")
    if repeats < 10:
        raise ValueError(f"need at least 10 repeats, got {repeats}")
    part = partition_by_threshold(graph, tau)
    rho = part.rho_light  # exact
    light = graph.degrees[graph.degrees <= tau]
    ew = Fraction(int(light.sum()), graph.n)  # E[w]
    ew2 = Fraction(int((light.astype(np.int64) ** 2).sum()), graph.n)
    var_w = ew2 - ew * ew

    oracle = QueryOracle(graph, seed)
    r = toss_budget(cfg, cfg.delta)
    q = mean_budget(cfg, tau, ew if ew > 0 else Fraction(1), cfg.delta)

    rho_hats = [coin_toss(oracle, tau, r).rho_hat for _ in range(repeats)]
    w_hats = [mean_est(oracle, tau, q).w_hat for _ in range(repeats)]

    checks = []

    # 1. coin-toss mean
    obs = float(np.mean([float(x) for x in rho_hats]))
    se = math.sqrt(float(rho * (1 - rho)) / (r * repeats))
    checks.append(
        LemmaCheck(
            name="coin_toss_mean",
            passed=abs(obs - float(rho)) <= 4 * se + 1e-12,
            applicable=True,
            observed=obs,
            bound=float(rho),
            details={"four_se": 4 * se, "tosses": r, "repeats": repeats},
        )
    )

    # 2. truncated-degree mean
    obs = float(np.mean([float(x) for x in w_hats]))
    se = math.sqrt(float(var_w) / (q * repeats)) if var_w > 0 else 0.0
    checks.append(
        LemmaCheck(
            name="truncated_mean",
            passed=abs(obs - float(ew)) <= 4 * se + 1e-12,
            applicable=True,
            observed=obs,
            bound=float(ew),
            details={"four_se": 4 * se, "samples": q, "repeats": repeats},
        )
    )

    # 3. variance bound: Var(w) <= tau * E[w], checked on raw samples
    n_var = min(q * repeats, 100_000)
    ws = np.zeros(0, dtype=np.int64)
    left = n_var
    while left:
        k = min(left, 1 << 20)
        _, ds = oracle.degree_random_batch(k)
        ws = np.concatenate([ws, np.where(ds <= tau, ds, 0)])
        left -= k
    obs = float(np.var(ws, ddof=1))
    bound = float(tau * ew)
    checks.append(
        LemmaCheck(
            name="variance_bound",
            passed=(obs <= 1.05 * bound + 1e-12) if bound else (obs == 0.0),
            applicable=True,
            observed=obs,
            bound=bound,
            details={"slack": 1.05, "exact_var": float(var_w), "samples": n_var},
        )
    )

    # 4. threshold classifier error rate
    applicable = rho <= Fraction(1, 4) or rho >= Fraction(3, 8)
    errs = 0
    rc = max(1, math.ceil(cfg.c_add * math.log(2 / classifier_delta)))
    if applicable:
        should_accept = rho >= Fraction(3, 8)
        for _ in range(repeats):
            accepted = coin_toss(oracle, tau, rc).rho_hat >= Fraction(5, 16)
            errs += accepted != should_accept
    rate = errs / repeats
    checks.append(
        LemmaCheck(
            name="classifier_error",
            passed=(rate <= 0.02) if applicable else True,
            applicable=applicable,
            observed=rate,
            bound=0.02,
            details={"tosses": rc, "rho_light": float(rho)},
        )
    )
    return checks
