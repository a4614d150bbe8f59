"""Command-line interface.

Four subcommands:

* ``degest generate`` -- write an instance family to edge-list files
  with a ground-truth JSON sidecar.
* ``degest estimate`` -- run one estimator on an edge-list file and
  print (or write) the estimate as JSON.
* ``degest bench``    -- run a JSON-described batch of experiments into
  an output directory: per-experiment CSVs, a deterministic
  summary.json, a manifest.json, and optional plots.
* ``degest verify``   -- run the statistical lemma checks on a graph.

Exit codes: 0 success, 1 bad input (arguments, files, bench spec),
2 infeasible generator parameters, 3 estimation or verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .estimator import (
    EstimatorConfig,
    EstimatorError,
    all_advice,
    no_advice,
    threshold_advice,
)
from .generators import (
    InfeasibleParameterError,
    gen_clique_matching,
    gen_er,
    gen_forest_union,
    gen_heavy_core,
    gen_lb_pair,
    write_instance_files,
)
from .graph import GraphError, ground_truth, load_edge_list
from .oracle import QueryOracle
from .verify import (
    lemma_checks,
    run_trials,
    sweep_alpha,
    sweep_epsilon,
    write_summary_json,
    write_trials_csv,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_ESTIMATION = 3


class SpecError(ValueError):
    """Malformed bench spec."""


# -------------------------------------------------------------- helpers


def _fraction_arg(value):
    """Parse '5/2', '2.5' or '[5, 2]' (from JSON) into a Fraction."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SpecError(f"fraction pair must have 2 entries, got {value!r}")
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, (int, float)):
        return Fraction(value)
    return Fraction(str(value))


def _config_from_args(args) -> EstimatorConfig:
    kwargs = {"epsilon": args.epsilon, "delta": args.delta}
    for name in ("c_add", "c_mult", "c_mean"):
        v = getattr(args, name, None)
        if v is not None:
            kwargs[name] = v
    return EstimatorConfig(**kwargs)


def _config_from_spec(raw: dict) -> EstimatorConfig:
    if not isinstance(raw, dict):
        raise SpecError("'config' must be an object")
    allowed = {"epsilon", "delta", "c_add", "c_mult", "c_mean", "max_threshold_doublings"}
    unknown = set(raw) - allowed
    if unknown:
        raise SpecError(f"unknown config keys: {sorted(unknown)}")
    if "epsilon" not in raw or "delta" not in raw:
        raise SpecError("'config' needs epsilon and delta")
    try:
        return EstimatorConfig(**raw)
    except (TypeError, ValueError) as err:
        raise SpecError(f"bad config: {err}")


def _parse_algorithm(text: str):
    """'no_advice', 'threshold_advice:<tau>' or 'all_advice:<tau>:<d_tilde>'."""
    parts = text.split(":")
    if parts[0] == "no_advice" and len(parts) == 1:
        return "no_advice", None, None
    if parts[0] == "threshold_advice" and len(parts) == 2:
        return "threshold_advice", int(parts[1]), None
    if parts[0] == "all_advice" and len(parts) == 3:
        return "all_advice", int(parts[1]), _fraction_arg(parts[2])
    raise ValueError(
        f"bad algorithm {text!r}: expected no_advice, threshold_advice:<tau> "
        f"or all_advice:<tau>:<d_tilde>"
    )


def _make_instances(family: str, params: dict, seed: int):
    """Instance(s) for a bench experiment; lb_pair honours params['case']."""
    params = dict(params)
    if family == "clique_matching":
        return [gen_clique_matching(seed=seed, **params)]
    if family == "heavy_core":
        return [gen_heavy_core(seed=seed, **params)]
    if family == "forest_union":
        return [gen_forest_union(seed=seed, **params)]
    if family == "er":
        return [gen_er(seed=seed, **params)]
    if family == "lb_pair":
        case = params.pop("case", "both")
        params["d"] = _fraction_arg(params["d"])
        single, double = gen_lb_pair(seed=seed, **params)
        if case == "single":
            return [single]
        if case == "double":
            return [double]
        if case == "both":
            return [single, double]
        raise SpecError(f"lb_pair case must be single/double/both, got {case!r}")
    raise SpecError(f"unknown family {family!r}")


# ---------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    seed = args.seed
    if args.family == "lb_pair":
        single, double = gen_lb_pair(args.n, _fraction_arg(args.d), args.alpha, seed)
        for inst, tag in ((single, "single"), (double, "double")):
            paths = write_instance_files(inst, f"{args.out}_{tag}")
            print(" ".join(str(p) for p in paths))
        return EXIT_OK
    if args.family == "clique_matching":
        inst = gen_clique_matching(args.n, args.s, args.k, seed)
    elif args.family == "heavy_core":
        inst = gen_heavy_core(args.n, args.s, args.k, args.matching_edges, seed)
    elif args.family == "forest_union":
        inst = gen_forest_union(args.n, args.alpha, seed)
    else:  # er
        inst = gen_er(args.n, args.p, seed)
    paths = write_instance_files(inst, args.out)
    print(" ".join(str(p) for p in paths))
    return EXIT_OK


# ---------------------------------------------------------------- estimate


def cmd_estimate(args) -> int:
    graph = load_edge_list(args.graph)
    cfg = _config_from_args(args)
    algorithm, tau, d_tilde = _parse_algorithm(args.algorithm)
    oracle = QueryOracle(graph, args.seed)
    if algorithm == "no_advice":
        est = no_advice(oracle, cfg)
    elif algorithm == "threshold_advice":
        est = threshold_advice(oracle, tau, cfg)
    else:
        est = all_advice(oracle, tau, d_tilde, cfg)
    payload = est.to_json_dict()
    payload["epsilon"] = cfg.epsilon
    payload["delta"] = cfg.delta
    payload["d_hat_float"] = float(est.d_hat)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------- bench


def _bench_trials(exp, cfg, gen_seed, trial_seed, out_dir, threads, emit_plots):
    instances = _make_instances(exp["family"], exp.get("params", {}), gen_seed)
    results = {}
    files = []
    for idx, inst in enumerate(instances):
        tag = exp["id"] if len(instances) == 1 else f"{exp['id']}_{inst.params.get('case', idx)}"
        algorithm = exp.get("algorithm", "no_advice")
        tau = exp.get("tau")
        d_tilde = exp.get("d_tilde")
        rep = run_trials(
            inst.graph,
            inst.truth,
            cfg,
            trials=int(exp["trials"]),
            base_seed=trial_seed,
            instance_id=tag,
            algorithm=algorithm,
            tau=tau,
            d_tilde=None if d_tilde is None else _fraction_arg(d_tilde),
            threads=threads,
        )
        csv_path = out_dir / f"{tag}.trials.csv"
        write_trials_csv(csv_path, rep.records)
        files.append(csv_path)
        if emit_plots:
            from .plotting import plot_trials

            files.extend(plot_trials(rep, out_dir / tag))
        results[tag] = rep.to_json_dict()
    return results, files


def _bench_sweep(exp, cfg, gen_seed, trial_seed, out_dir, threads, emit_plots):
    if exp["kind"] == "alpha_sweep":
        report = sweep_alpha(
            cfg,
            int(exp["n"]),
            _fraction_arg(exp["d"]),
            exp["alphas"],
            int(exp["trials_per_point"]),
            base_seed=trial_seed,
            threads=threads,
        )
    else:
        instances = _make_instances(exp["family"], exp.get("params", {}), gen_seed)
        if len(instances) != 1:
            raise SpecError("epsilon_sweep needs a single instance")
        inst = instances[0]
        report = sweep_epsilon(
            inst.graph,
            inst.truth,
            cfg,
            exp["epsilons"],
            int(exp["trials_per_point"]),
            base_seed=trial_seed,
            tau=int(exp["tau"]),
            threads=threads,
        )
    rows_path = out_dir / f"{exp['id']}.points.csv"
    with rows_path.open("w", newline="") as fh:
        import csv as _csv

        w = _csv.writer(fh)
        w.writerow(
            ["x", "trials", "successes", "mean_degree_queries", "mean_rand_edge", "mean_tau_used"]
        )
        for p in report.points:
            w.writerow(
                [p.x, p.trials, p.successes,
                 repr(p.mean_degree_queries), repr(p.mean_rand_edge), repr(p.mean_tau_used)]
            )
    files = [rows_path]
    if emit_plots:
        from .plotting import plot_scaling

        files.extend(plot_scaling(report, out_dir / exp["id"]))
    return {exp["id"]: report.to_json_dict()}, files


def cmd_bench(args) -> int:
    spec_path = Path(args.spec)
    try:
        spec = json.loads(spec_path.read_text())
    except json.JSONDecodeError as err:
        raise SpecError(f"{spec_path}: {err}")
    if not isinstance(spec, dict):
        raise SpecError("bench spec must be a JSON object")
    for key in ("seed", "config", "experiments"):
        if key not in spec:
            raise SpecError(f"bench spec missing {key!r}")
    cfg = _config_from_spec(spec["config"])
    experiments = spec["experiments"]
    if not isinstance(experiments, list) or not experiments:
        raise SpecError("'experiments' must be a non-empty list")
    ids = [e.get("id") for e in experiments]
    if len(set(ids)) != len(ids) or not all(ids):
        raise SpecError("every experiment needs a unique non-empty 'id'")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    import numpy as np

    words = np.random.SeedSequence(int(spec["seed"])).generate_state(
        2 * len(experiments), np.uint64
    )
    t0 = time.monotonic()
    summary = {"seed": spec["seed"], "config": spec["config"], "experiments": {}}
    all_files = []
    for j, exp in enumerate(experiments):
        kind = exp.get("kind")
        gen_seed, trial_seed = int(words[2 * j]), int(words[2 * j + 1])
        if kind == "trials":
            results, files = _bench_trials(
                exp, cfg, gen_seed, trial_seed, out_dir, args.threads, args.emit_plots
            )
        elif kind in ("alpha_sweep", "epsilon_sweep"):
            results, files = _bench_sweep(
                exp, cfg, gen_seed, trial_seed, out_dir, args.threads, args.emit_plots
            )
        else:
            raise SpecError(f"experiment {exp.get('id')!r}: unknown kind {kind!r}")
        summary["experiments"].update(results)
        all_files.extend(files)

    write_summary_json(out_dir / "summary.json", summary)
    manifest = {
        "spec": str(spec_path),
        "duration_seconds": time.monotonic() - t0,
        "files": sorted(str(p.name) for p in all_files) + ["summary.json"],
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {len(all_files) + 2} files to {out_dir}")
    return EXIT_OK


# ------------------------------------------------------------------ verify


def cmd_verify(args) -> int:
    graph = load_edge_list(args.graph)
    cfg = _config_from_args(args)
    checks = lemma_checks(
        graph, args.tau, cfg, repeats=args.repeats, seed=args.seed
    )
    failed = 0
    for c in checks:
        if not c.applicable:
            status = "SKIP"
        elif c.passed:
            status = "PASS"
        else:
            status = "FAIL"
            failed += 1
        print(f"{status} {c.name}: observed={c.observed:.6g} bound={c.bound:.6g}")
    if failed:
        print(f"{failed} check(s) failed")
        return EXIT_ESTIMATION
    return EXIT_OK


# -------------------------------------------------------------------- main


def _add_config_options(p, epsilon=0.1, delta=0.1):
    p.add_argument("--epsilon", type=float, default=epsilon)
    p.add_argument("--delta", type=float, default=delta)
    p.add_argument("--c-add", dest="c_add", type=float, default=None)
    p.add_argument("--c-mult", dest="c_mult", type=float, default=None)
    p.add_argument("--c-mean", dest="c_mean", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degest", description="average-degree estimation via graph queries"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an instance family to files")
    gsub = g.add_subparsers(dest="family", required=True)
    p = gsub.add_parser("clique_matching")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = gsub.add_parser("heavy_core")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--matching-edges", dest="matching_edges", type=int, required=True)
    p = gsub.add_parser("lb_pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=str, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p = gsub.add_parser("forest_union")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p = gsub.add_parser("er")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    for sp in gsub.choices.values():
        sp.add_argument("--out", type=str, required=True)
        sp.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("estimate", help="estimate the average degree of a graph file")
    e.add_argument("--graph", type=str, required=True)
    e.add_argument(
        "--algorithm",
        type=str,
        default="no_advice",
        help="no_advice | threshold_advice:<tau> | all_advice:<tau>:<d_tilde>",
    )
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", type=str, default=None)
    _add_config_options(e)

    b = sub.add_parser("bench", help="run a JSON experiment spec")
    b.add_argument("--spec", type=str, required=True)
    b.add_argument("--out-dir", dest="out_dir", type=str, required=True)
    b.add_argument("--emit-plots", dest="emit_plots", action="store_true")
    b.add_argument("--threads", type=int, default=None)

    v = sub.add_parser("verify", help="statistical checks of the sampling lemmas")
    v.add_argument("--graph", type=str, required=True)
    v.add_argument("--tau", type=int, required=True)
    v.add_argument("--repeats", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    _add_config_options(v)

    return parser


_COMMANDS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "bench": cmd_bench,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        code = exc.code if exc.code is not None else 0
        return EXIT_OK if code == 0 else EXIT_INPUT
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleParameterError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EstimatorError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (SpecError, GraphError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
