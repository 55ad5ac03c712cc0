"""Command-line interface.

Subcommands cover the whole workflow: ``graph`` (build + DOT/CSV export),
``membership`` (per-sample quality report), ``filter`` (apply a policy and
list kept/removed indices), ``train`` (fit one model and write it as JSON),
``predict`` (model + CSV in, probabilities out), ``cv`` (nested
cross-validation), and ``bench`` (incremental-recomputation timing).

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from .classifier import TrainedModel, predict_proba
from .dataset import Dataset
from .errors import (
    DataError,
    DuplicateSampleError,
    EmptyClassError,
    EmptySupportError,
    GGMarginError,
    NumericalError,
    SplitError,
    UndefinedMetricError,
    UsageError,
)
from .graph import build_graph, build_graph_with_witness, edge_list, extract_support, to_dot
from .harness import (
    ExperimentConfig,
    bench_recompute,
    benchmark_csv_rows,
    fit_pipeline,
    format_report_table,
    load_csv,
    read_csv_columns,
    report_to_dict,
    run_nested_cv,
    standardize,
)
from .regularization import membership_report

__all__ = ["cli_dispatch", "main"]


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors map to exit codes."""

    def error(self, message):
        raise UsageError(message)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("GGM_SEED")
    return int(env) if env else 0


def _say(args, text: str) -> None:
    if not getattr(args, "quiet", False):
        print(text)


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_csv(path, rows: list, fieldnames: list) -> None:
    def emit(fh):
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def _maybe_standardized(args, ds: Dataset) -> Dataset:
    if getattr(args, "standardize", False):
        ds, _ = standardize(ds, ds)
    return ds


def _cmd_graph(args) -> int:
    ds = _maybe_standardized(args, load_csv(args.data, args.label))
    g = build_graph_with_witness(ds) if args.witness else build_graph(ds)
    support = extract_support(g, ds)
    dot = to_dot(g, ds, support)
    if args.out:
        _write_text(args.out, dot)
        _say(args, f"wrote DOT graph ({ds.m} nodes, {len(edge_list(g))} edges) to {args.out}")
    else:
        print(dot, end="")
    if args.csv:
        support_pairs = {(e.j, e.k) for e in support.edges}
        rows = []
        if args.witness:
            W = g.witness_counts
            for j in range(ds.m):
                for k in range(j + 1, ds.m):
                    rows.append(
                        {
                            "i": int(g.sample_ids[j]),
                            "j": int(g.sample_ids[k]),
                            "edge": str(bool(g.adjacency[j, k])).lower(),
                            "support": str((j, k) in support_pairs).lower(),
                            "witnesses": int(W[j, k]),
                        }
                    )
            fieldnames = ["i", "j", "edge", "support", "witnesses"]
        else:
            for j, k in edge_list(g):
                rows.append(
                    {
                        "i": int(g.sample_ids[j]),
                        "j": int(g.sample_ids[k]),
                        "support": str((int(j), int(k)) in support_pairs).lower(),
                    }
                )
            fieldnames = ["i", "j", "support"]
        _write_csv(args.csv, rows, fieldnames)
        _say(args, f"wrote {len(rows)} rows to {args.csv}")
    return 0


def _cmd_membership(args) -> int:
    ds = _maybe_standardized(args, load_csv(args.data, args.label))
    g = build_graph(ds)
    counts = None
    if args.filter_policy == "count":
        counts = np.minimum(args.count, np.bincount(ds.y, minlength=ds.class_count) - 1)
        counts = np.maximum(counts, 0)
    rows = membership_report(g, ds, sigma=args.sigma, active_kind=args.membership,
                             policy=args.filter_policy, counts=counts)
    fieldnames = ["sample_index", "class", "q", "q_d", "threshold", "removed_flag"]
    out_rows = [
        {**r, "q": repr(r["q"]), "q_d": repr(r["q_d"]), "threshold": repr(r["threshold"])}
        for r in rows
    ]
    _write_csv(args.out, out_rows, fieldnames)
    if args.out:
        _say(args, f"wrote membership report ({len(rows)} samples) to {args.out}")
    return 0


def _cmd_filter(args) -> int:
    ds = _maybe_standardized(args, load_csv(args.data, args.label))
    g = build_graph(ds)
    counts = None
    if args.filter_policy == "count":
        counts = np.minimum(args.count, np.bincount(ds.y, minlength=ds.class_count) - 1)
        counts = np.maximum(counts, 0)
    rows = membership_report(g, ds, sigma=args.sigma, active_kind=args.membership,
                             policy=args.filter_policy, counts=counts)
    removed = [r["sample_index"] for r in rows if r["removed_flag"]]
    kept = [r["sample_index"] for r in rows if not r["removed_flag"]]
    if args.out:
        out_rows = [{"sample_index": r["sample_index"], "status": "removed" if r["removed_flag"] else "kept"} for r in rows]
        _write_csv(args.out, out_rows, ["sample_index", "status"])
        _say(args, f"kept {len(kept)}, removed {len(removed)}; wrote {args.out}")
    else:
        print("kept:", " ".join(str(i) for i in kept))
        print("removed:", " ".join(str(i) for i in removed))
    return 0


def _full_arch(args) -> str:
    if args.arch == "chipclass":
        return f"chipclass-{args.activation}"
    return args.arch


def _cmd_train(args) -> int:
    ds = load_csv(args.data, args.label)
    result = fit_pipeline(
        ds,
        architecture=_full_arch(args),
        membership=args.membership,
        sigma=args.sigma,
        filter_policy=args.filter_policy,
        count_r=args.count,
        mode=args.mode,
        init=args.init,
    )
    result.model.save(args.out)
    _say(
        args,
        f"trained {result.model.architecture} on {ds.m} samples: "
        f"{result.n_edges} support edges, {result.n_ssv} SSVs, "
        f"{result.n_removed} samples filtered"
        + (" (fallback to unfiltered support)" if result.fallback_unfiltered else "")
        + f"; model written to {args.out}",
    )
    return 0


def _cmd_predict(args) -> int:
    model = TrainedModel.load(args.model)
    label = args.label if args.label else None
    _, X, _, _ = read_csv_columns(args.data, label)
    P = predict_proba(model, X)
    fieldnames = [f"p_{name}" for name in model.class_labels] + ["predicted"]
    rows = []
    for i in range(P.shape[0]):
        row = {f"p_{name}": repr(float(P[i, c])) for c, name in enumerate(model.class_labels)}
        row["predicted"] = model.class_labels[int(np.argmax(P[i]))]
        rows.append(row)
    _write_csv(args.out, rows, fieldnames)
    if args.out:
        _say(args, f"wrote {P.shape[0]} predictions to {args.out}")
    return 0


def _cmd_cv(args) -> int:
    if args.target.endswith(".json"):
        config = ExperimentConfig.from_json_file(args.target)
    else:
        config = ExperimentConfig(
            dataset=args.target,
            label_column=args.label,
            architecture=_full_arch(args),
            membership=args.membership,
            sigma_low=args.sigma_low,
            sigma_high=args.sigma_high,
            sigma_grid=args.sigma_grid,
            sigma_draws=args.sigma_draws,
            filter_policy=args.filter_policy,
            outer_folds=args.outer_folds,
            inner_folds=args.inner_folds,
            mode=args.mode,
            init=args.init,
        )
    if args.seed is not None:
        config.seed = int(args.seed)
    config.jobs = int(args.jobs)
    report = run_nested_cv(config)
    payload = json.dumps(report_to_dict(report, config), indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_text(args.out, payload)
        _say(args, format_report_table(report))
        _say(args, f"report written to {args.out}")
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_bench(args) -> int:
    seed = _resolve_seed(args)
    if args.synthetic:
        m, n = args.synthetic
        rng = np.random.default_rng(seed)
        ds = Dataset(rng.standard_normal((m, n)), np.zeros(m, dtype=np.intp), ("synthetic",))
        dataset_id = f"synthetic-{m}x{n}"
    else:
        if not args.data:
            raise UsageError("bench needs a data file or --synthetic M N")
        ds = load_csv(args.data, args.label)
        dataset_id = os.path.basename(args.data)
    fractions = [float(tok) for tok in args.fractions.split(",") if tok]
    records = bench_recompute(ds, fractions, repetitions=args.reps, seed=seed, dataset_id=dataset_id)
    rows = [
        {**row, "fraction": repr(row["fraction"]), "seconds": repr(row["seconds"])}
        for row in benchmark_csv_rows(records)
    ]
    _write_csv(args.out, rows, ["dataset", "m", "fraction", "rep", "method", "seconds"])
    for rec in records:
        _say(
            args,
            f"fraction {rec.fraction:.2f}: fresh {rec.mean_fresh:.4f}s "
            f"(std {rec.std_fresh:.4f}), incremental {rec.mean_incremental:.4f}s "
            f"(std {rec.std_incremental:.4f})",
        )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ggmargin", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: GGM_SEED env var, then 0)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for candidate evaluation")
    common.add_argument("--quiet", action="store_true", help="suppress progress output and warnings")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("graph", parents=[common], help="build the Gabriel graph and export it")
    p.add_argument("data", help="CSV file with a header row")
    p.add_argument("--label", required=True, help="label column name")
    p.add_argument("--out", default=None, help="DOT output path (default: stdout)")
    p.add_argument("--csv", default=None, help="also write an edge CSV here")
    p.add_argument("--witness", action="store_true",
                   help="store witness counts; the CSV then lists every pair with its count")
    p.add_argument("--standardize", action="store_true", help="z-score features first")
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("membership", parents=[common], help="per-sample membership report")
    p.add_argument("data")
    p.add_argument("--label", required=True)
    p.add_argument("--sigma", type=float, default=1.0, help="kernel bandwidth for the distance form")
    p.add_argument("--membership", choices=["cardinality", "distance"], default="distance",
                   help="which form drives thresholds and the removed flag")
    p.add_argument("--filter-policy", choices=["threshold", "count"], default="threshold")
    p.add_argument("--count", type=int, default=1, help="per-class removal count for the count policy")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=_cmd_membership)

    p = sub.add_parser("filter", parents=[common], help="apply a filtering policy")
    p.add_argument("data")
    p.add_argument("--label", required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--membership", choices=["cardinality", "distance"], default="distance")
    p.add_argument("--filter-policy", choices=["threshold", "count"], default="threshold")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV of per-sample kept/removed status")
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("train", parents=[common], help="fit one model and write it as JSON")
    p.add_argument("data")
    p.add_argument("--label", required=True)
    p.add_argument("--arch", choices=["chipclass", "ssv-binary", "ssv-multiclass"], required=True)
    p.add_argument("--activation", choices=["exp", "tanh"], default="exp",
                   help="activation profile for chipclass")
    p.add_argument("--membership", choices=["cardinality", "distance"], default="distance")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--filter-policy", choices=["threshold", "count"], default="threshold")
    p.add_argument("--count", type=int, default=0)
    p.add_argument("--mode", choices=["pseudoinverse", "gradient"], default="pseudoinverse")
    p.add_argument("--init", choices=["pseudoinverse", "zeros"], default="pseudoinverse")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", parents=[common], help="class probabilities for a CSV of queries")
    p.add_argument("model", help="model JSON file written by train")
    p.add_argument("data", help="query CSV; must have the training feature columns")
    p.add_argument("--label", default=None, help="label column to ignore, if the file has one")
    p.add_argument("--out", default=None, help="probability CSV path (default: stdout)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("cv", parents=[common], help="nested cross-validation")
    p.add_argument("target", help="experiment config (.json) or dataset CSV")
    p.add_argument("--label", default="class")
    p.add_argument("--arch", choices=["chipclass", "ssv-binary", "ssv-multiclass"],
                   default="ssv-binary")
    p.add_argument("--activation", choices=["exp", "tanh"], default="exp")
    p.add_argument("--membership", choices=["cardinality", "distance"], default="distance")
    p.add_argument("--sigma-low", type=float, default=0.1)
    p.add_argument("--sigma-high", type=float, default=10.0)
    p.add_argument("--sigma-grid", type=int, default=20)
    p.add_argument("--sigma-draws", type=int, default=0,
                   help="use this many random log-uniform draws instead of the grid")
    p.add_argument("--filter-policy", choices=["threshold", "count"], default="threshold")
    p.add_argument("--outer-folds", type=int, default=5)
    p.add_argument("--inner-folds", type=int, default=5)
    p.add_argument("--mode", choices=["pseudoinverse", "gradient"], default="pseudoinverse")
    p.add_argument("--init", choices=["pseudoinverse", "zeros"], default="pseudoinverse")
    p.add_argument("--out", default=None, help="JSON report path (default: JSON to stdout)")
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("bench", parents=[common], help="incremental-recomputation benchmark")
    p.add_argument("data", nargs="?", default=None)
    p.add_argument("--label", default="class")
    p.add_argument("--synthetic", nargs=2, type=int, metavar=("M", "N"), default=None,
                   help="benchmark a seeded standard-normal dataset instead of a file")
    p.add_argument("--fractions", default="0.1,0.2,0.3", help="comma-separated removal fractions")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_bench)

    return parser


def cli_dispatch(argv) -> int:
    """Parse arguments, run the subcommand, map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        if getattr(args, "quiet", False):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return args.func(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (DataError, DuplicateSampleError, EmptyClassError, SplitError, EmptySupportError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, UndefinedMetricError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except GGMarginError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
