"""Command-line front end: train ensembles, compare penalty curves, run the
lower-bound simulator. Every run writes its artifacts plus a manifest with a
config echo and content hashes into one output directory.

Artifacts (per algorithm subdirectory for `train`):
  model.json           normalized voting classifier (tree schema in schema/)
  margins.csv          one sorted margin per row
  penalty.csv          p,theta,theta2_penalty,capital_N,capital_N_full
  histogram.csv        bin_left,bin_right,count
  errors.csv           round,train_error,test_error
  staged_margins.csv   stage,margin
  report.json          table-style record plus run metadata
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bd
from . import boosting, dataset, ensemble, lowerbound
from .errors import FeatureMismatchError, MarginBoostError
from .trees import MODE_CLASSIFICATION, MODE_GRADIENT, GrowthConfig

DEFAULT_GRID_SIZE = 200
DEFAULT_HISTOGRAM_BINS = 40
DEFAULT_STAGES = (10, 20, 50)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: Path, header: str, rows):
    lines = [header]
    lines.extend(",".join(_fmt(c) if not isinstance(c, str) else c for c in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _quantile_grid(size: int) -> np.ndarray:
    return np.arange(1, size + 1) / size


def _penalty_rows(profile: bd.MarginProfile, f, train, grid):
    per_point = ensemble.delta_second_moments(f, train.X)
    r = math.log2(16 * train.m)
    moment = bd.moment_statistic(per_point, r)
    rows = []
    for p in grid:
        theta_p = bd.theta_at_quantile(profile, p)
        if theta_p > 0:
            rows.append(
                (
                    p,
                    theta_p,
                    theta_p**-2,
                    bd.capital_n(moment, theta_p),
                    bd.capital_n_full(f, train, theta_p),
                )
            )
        else:
            rows.append((p, theta_p, None, None, None))
    return rows


def _train_one(algo: str, train, test, args, out_dir: Path) -> list[Path]:
    if algo == "ada":
        growth = GrowthConfig(max_leaves=args.tree_size, min_leaf=args.min_leaf, mode=MODE_CLASSIFICATION)
        config = boosting.BoostConfig(rounds=args.rounds, learning_rate=args.learning_rate, growth=growth, seed=args.seed)
        raw = boosting.train_adaboost(train, config)
    else:
        growth = GrowthConfig(max_leaves=args.tree_size, min_leaf=args.min_leaf, mode=MODE_GRADIENT)
        config = boosting.BoostConfig(rounds=args.rounds, learning_rate=args.learning_rate, growth=growth, seed=args.seed)
        raw = boosting.train_gradient_booster(train, config)

    f = ensemble.normalize(raw)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    model_path = out_dir / "model.json"
    model_path.write_text(json.dumps(f.to_dict(algo=raw.algo)))
    written.append(model_path)

    profile = bd.MarginProfile.from_values(ensemble.margins(f, train))
    margins_path = out_dir / "margins.csv"
    _write_csv(margins_path, "margin", [(v,) for v in profile.sorted_margins])
    written.append(margins_path)

    grid = _quantile_grid(args.grid)
    penalty_path = out_dir / "penalty.csv"
    _write_csv(
        penalty_path,
        "p,theta,theta2_penalty,capital_N,capital_N_full",
        _penalty_rows(profile, f, train, grid),
    )
    written.append(penalty_path)

    edges = np.linspace(-1.0, 1.0, DEFAULT_HISTOGRAM_BINS + 1)
    counts, large_fraction = bd.prediction_histogram(f, train, edges)
    hist_path = out_dir / "histogram.csv"
    _write_csv(
        hist_path,
        "bin_left,bin_right,count",
        [(edges[i], edges[i + 1], float(counts[i])) for i in range(len(counts))],
    )
    written.append(hist_path)

    train_errs = boosting.error_trace(raw, train)
    test_errs = boosting.error_trace(raw, test)
    errors_path = out_dir / "errors.csv"
    _write_csv(
        errors_path,
        "round,train_error,test_error",
        [(float(t + 1), train_errs[t], test_errs[t]) for t in range(raw.rounds)],
    )
    written.append(errors_path)

    stages = sorted({min(s, raw.rounds) for s in (*DEFAULT_STAGES, raw.rounds)})
    staged = boosting.staged_snapshots(raw, train, stages)
    staged_path = out_dir / "staged_margins.csv"
    rows = []
    for stage, prof in zip(stages, staged):
        rows.extend((float(stage), v) for v in prof.sorted_margins)
    _write_csv(staged_path, "stage,margin", rows)
    written.append(staged_path)

    report = bd.table_report(f, train, test)
    report.update(
        {
            "algo": raw.algo,
            "rounds_completed": raw.rounds,
            "stalled": raw.stalled,
            "large_prediction_fraction": large_fraction,
            "config": {
                "rounds": args.rounds,
                "tree_size": args.tree_size,
                "learning_rate": args.learning_rate,
                "min_leaf": args.min_leaf,
                "seed": args.seed,
                "split_seed": args.split_seed,
            },
        }
    )
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True))
    written.append(report_path)
    return written


def cmd_train(args) -> int:
    data = dataset.load_csv(args.data, args.label_col, args.positive_label)
    train, test = dataset.split_train_test(data, dataset.SplitSpec(seed=args.split_seed))
    out = Path(args.out)
    algos = ["ada", "gbm"] if args.algo == "both" else [args.algo]
    written = []
    for algo in algos:
        written.extend(_train_one(algo, train, test, args, out / algo))
    _write_manifest(out, vars(args), written)
    return 0


def cmd_compare(args) -> int:
    model_a = ensemble.VotingClassifier.from_dict(json.loads(Path(args.model_a).read_text()))
    model_b = ensemble.VotingClassifier.from_dict(json.loads(Path(args.model_b).read_text()))
    train = dataset.load_csv(args.data, args.label_col, args.positive_label)
    if model_a.n_features != model_b.n_features:
        raise FeatureMismatchError(
            f"models use {model_a.n_features} vs {model_b.n_features} features"
        )
    if train.n_features != model_a.n_features:
        raise FeatureMismatchError(
            f"data has {train.n_features} features, models expect {model_a.n_features}"
        )
    grid = _quantile_grid(args.grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    curves = {}
    for name, model in (("a", model_a), ("b", model_b)):
        profile = bd.MarginProfile.from_values(ensemble.margins(model, train))
        model_rows = _penalty_rows(profile, model, train, grid)
        curves[name] = model_rows
        rows.extend((name, *r) for r in model_rows)
    penalty_path = out / "penalty.csv"
    _write_csv(penalty_path, "model,p,theta,theta2_penalty,capital_N,capital_N_full", rows)

    def crossover(col: int) -> dict:
        both, a_less = 0, 0
        for ra, rb in zip(curves["a"], curves["b"]):
            if ra[col] is not None and rb[col] is not None:
                both += 1
                if ra[col] < rb[col]:
                    a_less += 1
        return {"defined_points": both, "fraction_a_below_b": a_less / both if both else None}

    comparison = {
        "model_a": str(args.model_a),
        "model_b": str(args.model_b),
        "grid_size": args.grid,
        "theta2": crossover(2),
        "capital_N": crossover(3),
    }
    comparison_path = out / "comparison.json"
    comparison_path.write_text(json.dumps(comparison, indent=2, sort_keys=True))
    _write_manifest(out, vars(args), [penalty_path, comparison_path])
    return 0


def cmd_lbsim(args) -> int:
    params = lowerbound.LBParams(u=args.u, d=args.d, m=args.m, trials=args.trials, seed=args.seed)
    order = lowerbound.verify_order_stat_bound(params)
    pz_lhs, pz_rhs, pz_pass = lowerbound.paley_zygmund_check(params, order.delta)
    chernoff = None
    lower = math.sqrt(3.0 / (args.m / args.u))
    if lower <= order.delta <= 0.5:
        lhs, rhs, ok = lowerbound.reverse_chernoff_check(args.m, args.u, order.delta)
        chernoff = {"lhs_exact_cdf": lhs, "rhs_bound": rhs, "passed": ok}
    report = {
        "note": (
            "Direct (u,d,m) verification of the occupancy kernels; the "
            "asymptotic construction's own parameter settings are not "
            "instantiated because its constants force astronomically large "
            "bin counts."
        ),
        "params": {"u": args.u, "d": args.d, "m": args.m, "trials": args.trials, "seed": args.seed},
        "delta": order.delta,
        "order_statistic": {
            "threshold": order.threshold,
            "empirical_frequency": order.empirical_frequency,
            "required_frequency": order.required_frequency,
            "std_error": order.std_error,
            "passed": order.passed,
        },
        "paley_zygmund": {"lhs": pz_lhs, "rhs_bound": pz_rhs, "passed": pz_pass},
        "reverse_chernoff": chernoff,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "lb_report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True))
    _write_manifest(out, vars(args), [report_path])
    return 0


def _write_manifest(out: Path, config: dict, files: list[Path]):
    manifest = {
        "config": {k: v for k, v in config.items() if k != "func"},
        "files": {
            str(p.relative_to(out)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in files
        },
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marginboost")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train ensembles and emit diagnostics")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--label-col", required=True)
    p_train.add_argument("--positive-label", required=True)
    p_train.add_argument("--algo", choices=["ada", "gbm", "both"], default="both")
    p_train.add_argument("--rounds", type=int, default=200)
    p_train.add_argument("--tree-size", type=int, default=5, help="maximum leaf count")
    p_train.add_argument("--learning-rate", type=float, default=0.1)
    p_train.add_argument("--min-leaf", type=int, default=20)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--split-seed", type=int, default=0)
    p_train.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train)

    p_cmp = sub.add_parser("compare", help="compare two models' penalty curves")
    p_cmp.add_argument("--model-a", required=True)
    p_cmp.add_argument("--model-b", required=True)
    p_cmp.add_argument("--data", required=True)
    p_cmp.add_argument("--label-col", required=True)
    p_cmp.add_argument("--positive-label", required=True)
    p_cmp.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE)
    p_cmp.add_argument("--out", required=True)
    p_cmp.set_defaults(func=cmd_compare)

    p_lb = sub.add_parser("lbsim", help="lower-bound kernel simulation")
    p_lb.add_argument("--u", type=int, default=100)
    p_lb.add_argument("--d", type=int, default=5)
    p_lb.add_argument("--m", type=int, default=1000)
    p_lb.add_argument("--trials", type=int, default=10_000)
    p_lb.add_argument("--seed", type=int, default=0)
    p_lb.add_argument("--out", required=True)
    p_lb.set_defaults(func=cmd_lbsim)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MarginBoostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
