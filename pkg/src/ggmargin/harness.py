"""Experiment harness: ingestion, cross-validation, and benchmarking.

The nested cross-validation driver runs the full pipeline for every
hyperparameter candidate: standardize the training split, build the witness
graph once, score sample memberships, filter, recompute the graph
incrementally, extract the support structure, fit, and evaluate.  The
witness graph and pairwise distances of each training split are shared
across all candidates, which is the whole point of storing witness counts.

Everything is deterministic under a fixed seed, including parallel runs:
results are collected by candidate index, never by completion order.
"""

from __future__ import annotations

import csv
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np

from .classifier import (
    ARCHITECTURES,
    build_chipclass,
    fit_multiclass,
    fit_ssv_binary,
    predict_proba,
)
from .dataset import Dataset, Preprocessing
from .errors import DataError, EmptySupportError, SplitError, UsageError
from .graph import GabrielGraph, build_graph, build_graph_with_witness, extract_support, recompute_after_removal
from .numeric import MetricReport, auc_binary, pairwise_sq_dists, roc_auc_ovo
from .regularization import FilterModel, all_memberships, class_thresholds, filter_samples

__all__ = [
    "load_csv",
    "standardize",
    "stratified_kfold",
    "ExperimentConfig",
    "PipelineResult",
    "fit_pipeline",
    "run_nested_cv",
    "report_to_dict",
    "format_report_table",
    "BenchmarkRecord",
    "bench_recompute",
    "benchmark_csv_rows",
    "MEMBERSHIP_KINDS",
]

MEMBERSHIP_KINDS = ("cardinality", "distance")
MISSING_TOKENS = ("", "?", "na", "nan", "null")


def read_csv_columns(path, label_column: str | None):
    """Raw CSV parsing shared by :func:`load_csv` and query-file loading.

    Returns (feature_names, feature_matrix, label_strings, data_line_numbers);
    labels are ``None`` when ``label_column`` is.  No duplicate handling at
    this level.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        if label_column is not None:
            if header.count(label_column) > 1:
                raise DataError(f"label column {label_column!r} appears more than once in {path}")
            if label_column not in header:
                raise DataError(f"label column {label_column!r} not found in {path} (columns: {header})")
            label_pos = header.index(label_column)
        else:
            label_pos = None
        feature_names = [h for i, h in enumerate(header) if i != label_pos]
        if not feature_names:
            raise DataError(f"{path} has no feature columns")
        rows, labels, line_numbers = [], [], []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DataError(f"{path} line {line_no}: expected {len(header)} cells, got {len(cells)}")
            feats = []
            for pos, cell in enumerate(cells):
                if pos == label_pos:
                    continue
                text = cell.strip()
                if text.lower() in MISSING_TOKENS:
                    raise DataError(
                        f"{path} line {line_no}: missing value in column {header[pos]!r} "
                        "(no imputation is performed)"
                    )
                try:
                    feats.append(float(text))
                except ValueError:
                    raise DataError(
                        f"{path} line {line_no}: non-numeric value {text!r} in column {header[pos]!r}"
                    ) from None
            rows.append(feats)
            line_numbers.append(line_no)
            if label_pos is not None:
                labels.append(cells[label_pos].strip())
        if not rows:
            raise DataError(f"{path} has a header but no data rows")
    X = np.asarray(rows, dtype=np.float64)
    return feature_names, X, (labels if label_pos is not None else None), line_numbers


def _sorted_labels(values: set) -> list:
    try:
        return sorted(values, key=lambda s: (float(s), s))
    except ValueError:
        return sorted(values)


def load_csv(path, label_column: str) -> Dataset:
    """Read a labeled CSV into a Dataset.

    Features must parse as reals; a missing cell is an error (this package
    never imputes).  Label values are mapped to dense class ids, ordered
    numerically when every label parses as a number and lexicographically
    otherwise; the original strings are retained for reporting.

    Duplicate feature rows cannot enter a Dataset (diametral-sphere
    adjacency is undefined for coincident points), so later occurrences are
    dropped here with a warning naming the file lines; conflicting labels
    among dropped duplicates are called out, since they usually indicate a
    data problem worth looking at.
    """
    _, X, labels, line_numbers = read_csv_columns(path, label_column)
    seen: dict = {}
    keep, dropped_lines, conflicts = [], [], 0
    for i in range(X.shape[0]):
        key = X[i].tobytes()
        if key in seen:
            dropped_lines.append(line_numbers[i])
            if labels[seen[key]] != labels[i]:
                conflicts += 1
        else:
            seen[key] = i
            keep.append(i)
    if dropped_lines:
        shown = ", ".join(str(n) for n in dropped_lines[:12])
        if len(dropped_lines) > 12:
            shown += f", ... ({len(dropped_lines) - 12} more)"
        msg = (
            f"{path}: dropped {len(dropped_lines)} duplicate feature rows "
            f"(keeping first occurrences): lines {shown}"
        )
        if conflicts:
            msg += f"; {conflicts} of them carried a different label than the row kept"
        warnings.warn(msg, stacklevel=2)
        X = X[keep]
        labels = [labels[i] for i in keep]
    label_names = _sorted_labels(set(labels))
    mapping = {name: i for i, name in enumerate(label_names)}
    y = np.asarray([mapping[s] for s in labels], dtype=np.intp)
    return Dataset(X, y, tuple(label_names))


def standardize(train: Dataset, apply_to: Dataset):
    """Z-score ``apply_to`` using statistics fitted on ``train``.

    Zero-variance training columns are dropped from the output (with a
    warning); it is an error for every column to be constant.  Returns the
    transformed dataset and the fitted :class:`Preprocessing`.
    """
    if train.m < 2:
        raise DataError("standardization needs at least two training rows")
    means = train.X.mean(axis=0)
    stds = train.X.std(axis=0)
    kept = np.flatnonzero(stds > 0)
    if kept.size == 0:
        raise DataError("every feature column has zero variance")
    if kept.size < train.n:
        dropped = np.setdiff1d(np.arange(train.n), kept)
        warnings.warn(
            f"dropping {dropped.size} zero-variance feature column(s): {dropped.tolist()}",
            stacklevel=2,
        )
    prep = Preprocessing(means[kept], stds[kept], kept, train.n)
    return Dataset(prep.transform(apply_to.X), apply_to.y, apply_to.class_labels), prep


def stratified_kfold(dataset: Dataset, k: int, seed: int):
    """Deterministic stratified k-fold split.

    Each class's indices are shuffled under the seed and dealt round-robin
    into folds, so per-class counts across folds differ by at most one.
    Returns ``[(train_indices, test_indices), ...]`` with both sides sorted.
    """
    if k < 2:
        raise SplitError(f"fold count must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    fold_members: list[list] = [[] for _ in range(k)]
    for cls in range(dataset.class_count):
        members = dataset.class_indices(cls)
        if members.size < k:
            raise SplitError(
                f"class {dataset.class_labels[cls]!r} has {members.size} samples, fewer than k={k}"
            )
        order = rng.permutation(members)
        for t, idx in enumerate(order):
            fold_members[t % k].append(int(idx))
    everything = np.arange(dataset.m)
    splits = []
    for f in range(k):
        test = np.asarray(sorted(fold_members[f]), dtype=np.intp)
        train = np.setdiff1d(everything, test)
        splits.append((train, test))
    return splits


@dataclass
class ExperimentConfig:
    """Everything a nested cross-validation run depends on.

    ``sigma_draws > 0`` switches the bandwidth search from a log-spaced grid
    of ``sigma_grid`` points to that many seeded log-uniform draws.  The
    count-policy search shares one requested removal count across classes,
    capped per class at ``count_cap_fraction`` of the class population.
    A ``seed`` of None falls back to the GGM_SEED environment variable, then
    to 0.
    """

    dataset: str | None = None
    label_column: str = "class"
    architecture: str = "ssv-binary"
    membership: str = "distance"
    sigma_low: float = 0.1
    sigma_high: float = 10.0
    sigma_grid: int = 20
    sigma_draws: int = 0
    filter_policy: str = "threshold"
    count_grid: tuple = (0, 1, 2, 5, 10)
    count_cap_fraction: float = 0.2
    outer_folds: int = 5
    inner_folds: int = 5
    seed: int | None = None
    mode: str = "pseudoinverse"
    init: str = "pseudoinverse"
    jobs: int = 1

    def validate(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise UsageError(f"unknown architecture {self.architecture!r} (choose from {ARCHITECTURES})")
        if self.membership not in MEMBERSHIP_KINDS:
            raise UsageError(f"unknown membership kind {self.membership!r}")
        if self.filter_policy not in ("threshold", "count"):
            raise UsageError(f"unknown filter policy {self.filter_policy!r}")
        if self.outer_folds < 2 or self.inner_folds < 2:
            raise UsageError("fold counts must be >= 2")
        if not (0 < self.sigma_low < self.sigma_high):
            raise UsageError("sigma bounds must satisfy 0 < low < high")
        if self.membership == "distance" and self.sigma_grid < 1 and self.sigma_draws < 1:
            raise UsageError("distance membership needs a sigma grid or draws")
        if self.sigma_draws < 0 or self.sigma_grid < 0:
            raise UsageError("sigma search sizes cannot be negative")
        if self.filter_policy == "count":
            if not self.count_grid or any(int(r) < 0 for r in self.count_grid):
                raise UsageError("count policy needs a grid of non-negative removal counts")
        if not (0 < self.count_cap_fraction <= 1):
            raise UsageError("count_cap_fraction must lie in (0, 1]")
        if self.mode not in ("pseudoinverse", "gradient") or self.init not in ("pseudoinverse", "zeros"):
            raise UsageError("invalid training mode or init")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")

    @property
    def resolved_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        env = os.environ.get("GGM_SEED")
        return int(env) if env else 0

    def sigma_candidates(self) -> list:
        if self.membership == "cardinality":
            return [None]
        if self.sigma_draws > 0:
            rng = np.random.default_rng([self.resolved_seed, 7919])
            lo, hi = np.log10(self.sigma_low), np.log10(self.sigma_high)
            return sorted(float(10.0**u) for u in rng.uniform(lo, hi, self.sigma_draws))
        return [float(s) for s in np.geomspace(self.sigma_low, self.sigma_high, self.sigma_grid)]

    def candidates(self) -> list:
        counts = [int(r) for r in self.count_grid] if self.filter_policy == "count" else [None]
        return [(sigma, r) for sigma in self.sigma_candidates() for r in counts]

    def to_dict(self) -> dict:
        out = {}
        for f in dataclass_fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclass_fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        kwargs = dict(d)
        if "count_grid" in kwargs and kwargs["count_grid"] is not None:
            kwargs["count_grid"] = tuple(int(r) for r in kwargs["count_grid"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        import json

        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        return cls.from_dict(payload)


@dataclass(frozen=True)
class PipelineResult:
    """A fitted model plus bookkeeping about how filtering went."""

    model: object
    n_ssv: int
    n_edges: int
    n_removed: int
    fallback_unfiltered: bool


@dataclass(frozen=True)
class _TrainCache:
    """Per-training-split state shared across hyperparameter candidates."""

    ds: Dataset
    prep: Preprocessing
    graph: GabrielGraph
    d2: np.ndarray
    q_card: np.ndarray


def _build_cache(train_raw: Dataset) -> _TrainCache:
    ds, prep = standardize(train_raw, train_raw)
    g = build_graph_with_witness(ds)
    d2 = pairwise_sq_dists(ds.X)
    q_card = all_memberships(g, ds, "cardinality")
    return _TrainCache(ds, prep, g, d2, q_card)


def _capped_counts(requested: int, y: np.ndarray, class_count: int, cap_fraction: float) -> np.ndarray:
    pops = np.bincount(y, minlength=class_count)
    caps = np.floor(cap_fraction * pops).astype(np.intp)
    return np.minimum(int(requested), caps)


def _fit_from_cache(
    cache: _TrainCache,
    architecture: str,
    membership: str,
    sigma: float | None,
    filter_policy: str,
    count_r: int | None,
    mode: str,
    init: str,
    count_cap_fraction: float,
) -> PipelineResult:
    ds = cache.ds
    if membership == "cardinality":
        memb = cache.q_card
    else:
        memb = all_memberships(cache.graph, ds, "distance", sigma=sigma, d2=cache.d2)
    if filter_policy == "threshold":
        thresholds = class_thresholds(memb, ds.y, ds.class_count)
        fm = FilterModel(memb, "threshold", thresholds=thresholds, sigma=sigma)
    else:
        counts = _capped_counts(count_r or 0, ds.y, ds.class_count, count_cap_fraction)
        fm = FilterModel(memb, "count", counts=counts, sigma=sigma)
    kept, removed = filter_samples(ds, fm)
    if removed.size:
        sub_graph = recompute_after_removal(cache.graph, ds, removed)
        sub_ds = ds.subset(kept)
    else:
        sub_graph, sub_ds = cache.graph, ds
    support = extract_support(sub_graph, sub_ds)
    fit_ds = sub_ds
    fallback = False
    if support.empty:
        support = extract_support(cache.graph, cache.ds)
        fit_ds = cache.ds
        fallback = True
        if support.empty:
            raise EmptySupportError(
                "no cross-class edge even without filtering; the data holds a single class"
            )
    policy_desc = fm.describe() if not fallback else "none (fallback: filtered support was empty)"
    if architecture.startswith("chipclass"):
        activation = architecture.split("-", 1)[1]
        model = build_chipclass(fit_ds, support, activation, cache.prep,
                                sigma_used=sigma, filter_policy=policy_desc)
    elif architecture == "ssv-binary":
        model = fit_ssv_binary(fit_ds, support, cache.prep,
                               sigma_used=sigma, filter_policy=policy_desc)
    else:
        model = fit_multiclass(fit_ds, support, mode=mode, init=init, preprocessing=cache.prep,
                               sigma_used=sigma, filter_policy=policy_desc)
    return PipelineResult(model, support.n_ssvs, support.n_edges, int(removed.size), fallback)


def fit_pipeline(
    train: Dataset,
    architecture: str,
    membership: str = "distance",
    sigma: float | None = 1.0,
    filter_policy: str = "threshold",
    count_r: int | None = 0,
    mode: str = "pseudoinverse",
    init: str = "pseudoinverse",
    count_cap_fraction: float = 0.2,
) -> PipelineResult:
    """Run the full training pipeline once on a raw-feature dataset.

    Standardize, build the witness graph, score memberships, filter,
    recompute the graph, extract support, fit the requested architecture.
    """
    if architecture not in ARCHITECTURES:
        raise UsageError(f"unknown architecture {architecture!r}")
    if membership not in MEMBERSHIP_KINDS:
        raise UsageError(f"unknown membership kind {membership!r}")
    if membership == "distance" and (sigma is None or sigma <= 0):
        raise UsageError("distance membership needs a positive sigma")
    cache = _build_cache(train)
    return _fit_from_cache(
        cache, architecture, membership,
        sigma if membership == "distance" else None,
        filter_policy, count_r, mode, init, count_cap_fraction,
    )


def _score_model(model, X_raw: np.ndarray, y: np.ndarray, class_count: int) -> float:
    P = predict_proba(model, X_raw)
    if class_count == 2:
        return auc_binary(P[:, 1], y == 1)
    return roc_auc_ovo(P, y)


def run_nested_cv(config: ExperimentConfig, dataset: Dataset | None = None) -> MetricReport:
    """Nested stratified cross-validation with hyperparameter search.

    Outer folds estimate generalization; per outer fold, every (sigma,
    removal-count) candidate is scored by inner cross-validation on the
    outer-training split only, the best candidate (ties to the earliest in
    the fixed candidate order) is refit on the whole outer-training split,
    and the refit model is evaluated once on the held-out outer fold.  Test
    rows never influence preprocessing, graphs, memberships, or selection.

    If a candidate's filtering leaves no cross-class edge, that candidate
    falls back to the unfiltered support structure and is flagged in the
    per-fold details rather than being skipped.
    """
    config.validate()
    if dataset is None:
        if not config.dataset:
            raise UsageError("config names no dataset and none was passed in")
        dataset = load_csv(config.dataset, config.label_column)
    if config.architecture != "ssv-multiclass" and dataset.class_count != 2:
        raise DataError(
            f"{config.architecture} needs a two-class dataset, got {dataset.class_count} classes"
        )
    seed = config.resolved_seed
    candidates = config.candidates()
    outer = stratified_kfold(dataset, config.outer_folds, seed)
    metric_name = "auc" if dataset.class_count == 2 else "roc_auc_ovo"

    fold_values, details = [], []
    for f, (train_idx, test_idx) in enumerate(outer):
        train_raw = dataset.subset(train_idx)
        inner = stratified_kfold(train_raw, config.inner_folds, seed * 9973 + f + 1)
        caches = [_build_cache(train_raw.subset(itr)) for itr, _ in inner]
        val_sets = [(train_raw.X[ival], train_raw.y[ival]) for _, ival in inner]

        def eval_candidate(cand):
            sigma, count_r = cand
            scores = []
            for cache, (X_val, y_val) in zip(caches, val_sets):
                res = _fit_from_cache(
                    cache, config.architecture, config.membership, sigma,
                    config.filter_policy, count_r, config.mode, config.init,
                    config.count_cap_fraction,
                )
                scores.append(_score_model(res.model, X_val, y_val, dataset.class_count))
            return float(np.mean(scores))

        if config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                inner_means = list(pool.map(eval_candidate, candidates))
        else:
            inner_means = [eval_candidate(cand) for cand in candidates]

        best_idx = int(np.argmax(inner_means))
        best_sigma, best_count = candidates[best_idx]
        outer_cache = _build_cache(train_raw)
        res = _fit_from_cache(
            outer_cache, config.architecture, config.membership, best_sigma,
            config.filter_policy, best_count, config.mode, config.init,
            config.count_cap_fraction,
        )
        X_test, y_test = dataset.X[test_idx], dataset.y[test_idx]
        fold_metric = _score_model(res.model, X_test, y_test, dataset.class_count)
        detail = {
            "fold": f,
            "metric": float(fold_metric),
            "sigma": best_sigma,
            "filter": res.model.filter_policy,
            "requested_count": best_count,
            "n_ssv": res.n_ssv,
            "n_edges": res.n_edges,
            "n_removed": res.n_removed,
            "fallback_unfiltered": res.fallback_unfiltered,
            "inner_mean": float(inner_means[best_idx]),
        }
        if dataset.class_count == 2:
            P = predict_proba(res.model, X_test)
            detail["metric_alt_orientation"] = float(auc_binary(P[:, 0], y_test == 0))
        fold_values.append(float(fold_metric))
        details.append(detail)

    extras = {
        "seed": seed,
        "architecture": config.architecture,
        "dataset": config.dataset or "<in-memory>",
        "class_labels": list(dataset.class_labels),
    }
    if dataset.class_count == 2:
        extras["positive_label"] = dataset.class_labels[1]
        extras["alt_positive_label"] = dataset.class_labels[0]
    return MetricReport.from_values(metric_name, fold_values, details, extras)


def report_to_dict(report: MetricReport, config: ExperimentConfig | None = None) -> dict:
    """JSON-ready view of a cross-validation report."""
    out = {
        "metric": report.metric_name,
        "per_fold": list(report.details),
        "mean": report.mean,
        "std": report.std,
        "extras": dict(report.extras),
    }
    if config is not None:
        out["config"] = config.to_dict()
    return out


def format_report_table(report: MetricReport) -> str:
    """Small aligned text table of per-fold results."""
    header = f"{'fold':>4}  {'metric':>10}  {'sigma':>10}  {'n_ssv':>6}  filter"
    lines = [header, "-" * len(header)]
    for d in report.details:
        sigma = "-" if d.get("sigma") is None else f"{d['sigma']:.4f}"
        lines.append(
            f"{d['fold']:>4}  {d['metric']:>10.6f}  {sigma:>10}  {d['n_ssv']:>6}  {d['filter']}"
        )
    lines.append("-" * len(header))
    lines.append(f"{report.metric_name}: mean {report.mean:.6f}  std {report.std:.6f}")
    return "\n".join(lines)


@dataclass(frozen=True)
class BenchmarkRecord:
    """Timed comparison of incremental recomputation against fresh builds."""

    dataset_id: str
    m: int
    fraction: float
    repetitions: int
    times_fresh: tuple
    times_incremental: tuple
    mean_fresh: float
    std_fresh: float
    mean_incremental: float
    std_incremental: float

    @classmethod
    def from_times(cls, dataset_id, m, fraction, fresh, incremental) -> "BenchmarkRecord":
        fresh = tuple(float(t) for t in fresh)
        incremental = tuple(float(t) for t in incremental)
        if len(fresh) != len(incremental) or len(fresh) < 3:
            raise DataError("benchmark needs at least 3 repetitions per method")
        return cls(
            dataset_id=str(dataset_id),
            m=int(m),
            fraction=float(fraction),
            repetitions=len(fresh),
            times_fresh=fresh,
            times_incremental=incremental,
            mean_fresh=float(np.mean(fresh)),
            std_fresh=float(np.std(fresh)),
            mean_incremental=float(np.mean(incremental)),
            std_incremental=float(np.std(incremental)),
        )


def bench_recompute(
    dataset: Dataset,
    removal_fractions,
    repetitions: int = 5,
    seed: int = 0,
    dataset_id: str = "dataset",
):
    """Time incremental graph recomputation against fresh rebuilds.

    The witness graph is built once up front and its cost excluded: it is
    shared across every filtering candidate in a hyperparameter sweep, which
    is the scenario the incremental path exists for.  For each removal
    fraction and repetition, a removal set is drawn under the seed, both
    paths are run, and their adjacencies must match exactly before the
    timings are recorded — a mismatch aborts the whole benchmark.
    """
    fractions = [float(f) for f in removal_fractions]
    if not fractions or any(not (0.0 < f < 1.0) for f in fractions):
        raise DataError("removal fractions must lie strictly between 0 and 1")
    if repetitions < 3:
        raise DataError("benchmark needs at least 3 repetitions")
    g = build_graph_with_witness(dataset)
    rng = np.random.default_rng(seed)
    records = []
    for fraction in fractions:
        r = int(round(fraction * dataset.m))
        r = max(1, min(r, dataset.m - 2))
        fresh_times, inc_times = [], []
        for _ in range(repetitions):
            removed = np.sort(rng.choice(dataset.m, size=r, replace=False))
            survivors = np.setdiff1d(np.arange(dataset.m), removed)
            sub = dataset.subset(survivors)

            t0 = time.perf_counter()
            incremental = recompute_after_removal(g, dataset, removed)
            t_inc = time.perf_counter() - t0

            t0 = time.perf_counter()
            fresh = build_graph(sub)
            t_fresh = time.perf_counter() - t0

            if not np.array_equal(incremental.adjacency, fresh.adjacency):
                raise DataError(
                    f"incremental and fresh adjacencies differ at fraction {fraction}; "
                    "benchmark aborted"
                )
            fresh_times.append(t_fresh)
            inc_times.append(t_inc)
        records.append(BenchmarkRecord.from_times(dataset_id, dataset.m, fraction, fresh_times, inc_times))
    return records


def benchmark_csv_rows(records) -> list:
    """Long-format rows (dataset, m, fraction, rep, method, seconds)."""
    rows = []
    for rec in records:
        for rep in range(rec.repetitions):
            rows.append(
                {
                    "dataset": rec.dataset_id,
                    "m": rec.m,
                    "fraction": rec.fraction,
                    "rep": rep,
                    "method": "fresh",
                    "seconds": rec.times_fresh[rep],
                }
            )
            rows.append(
                {
                    "dataset": rec.dataset_id,
                    "m": rec.m,
                    "fraction": rec.fraction,
                    "rep": rep,
                    "method": "incremental",
                    "seconds": rec.times_incremental[rep],
                }
            )
    return rows
