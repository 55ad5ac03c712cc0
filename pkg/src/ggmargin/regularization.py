"""Graph-based sample quality scores and filtering policies.

A sample that disagrees with most of its graph neighborhood is likely label
noise or an outlier; removing such samples before the margin structure is
extracted keeps overlapping classes from spraying support edges across the
whole overlap region.  Two membership scores are provided: a cardinality
form (fraction of neighbors sharing the sample's class) and a
distance-weighted form where each neighbor is weighted by a Gaussian kernel,
so near neighbors count for more.  As the kernel bandwidth grows the weights
flatten and the distance form converges to the cardinality form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError, EmptyClassError
from .graph import GabrielGraph
from .numeric import pairwise_sq_dists

__all__ = [
    "FilterModel",
    "gaussian_kernel",
    "membership_cardinality",
    "membership_distance",
    "all_memberships",
    "class_thresholds",
    "filter_samples",
    "membership_report",
]

POLICIES = ("threshold", "count")


def gaussian_kernel(a: np.ndarray, b: np.ndarray, sigma: float) -> float:
    """exp(-||a-b||^2 / (2 sigma^2)) for two equal-length vectors."""
    if sigma <= 0:
        raise DataError(f"kernel bandwidth must be positive, got {sigma}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"kernel arguments must be equal-length vectors, got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DataError("kernel arguments must be finite")
    return float(np.exp(-((a - b) ** 2).sum() / (2.0 * sigma * sigma)))


def _neighbor_mask(graph: GabrielGraph, dataset: Dataset, i: int) -> np.ndarray:
    if graph.m != dataset.m:
        raise DataError("graph and dataset are not index-aligned")
    if not (0 <= i < dataset.m):
        raise DataError(f"sample index {i} out of range for m={dataset.m}")
    mask = graph.adjacency[i]
    if not mask.any():
        raise DataError(f"sample {i} has no neighbors; the graph is malformed")
    return mask


def membership_cardinality(graph: GabrielGraph, dataset: Dataset, i: int) -> float:
    """Fraction of sample i's graph neighbors that share its class."""
    mask = _neighbor_mask(graph, dataset, i)
    same = dataset.y[mask] == dataset.y[i]
    return float(same.sum() / mask.sum())


def membership_distance(graph: GabrielGraph, dataset: Dataset, i: int, sigma: float) -> float:
    """Kernel-weighted fraction of same-class mass in sample i's neighborhood.

    Each neighbor k contributes exp(-||X_i - X_k||^2 / (2 sigma^2)); the
    score is the same-class share of the total contribution.
    """
    if sigma <= 0:
        raise DataError(f"kernel bandwidth must be positive, got {sigma}")
    mask = _neighbor_mask(graph, dataset, i)
    idx = np.flatnonzero(mask)
    d2 = ((dataset.X[idx] - dataset.X[i]) ** 2).sum(axis=1)
    logits = -d2 / (2.0 * sigma * sigma)
    # shift by the largest logit so a tiny bandwidth cannot underflow the
    # whole neighborhood to zero at once; the shift cancels in the ratio
    w = np.exp(logits - logits.max())
    total = w.sum()
    same = w[dataset.y[idx] == dataset.y[i]].sum()
    return float(same / total)


def all_memberships(
    graph: GabrielGraph,
    dataset: Dataset,
    kind: str = "cardinality",
    sigma: float | None = None,
    d2: np.ndarray | None = None,
) -> np.ndarray:
    """Membership scores for every sample at once.

    ``kind`` selects the cardinality or distance form; the distance form
    needs ``sigma``.  A precomputed squared-distance matrix can be passed to
    avoid recomputing it across a bandwidth sweep.
    """
    if graph.m != dataset.m:
        raise DataError("graph and dataset are not index-aligned")
    A = graph.adjacency
    same = dataset.y[:, None] == dataset.y[None, :]
    if kind == "cardinality":
        deg = A.sum(axis=1)
        if (deg == 0).any():
            raise DataError("graph has an isolated vertex; it is malformed")
        return (A & same).sum(axis=1) / deg
    if kind == "distance":
        if sigma is None or sigma <= 0:
            raise DataError("distance membership needs a positive sigma")
        deg = A.sum(axis=1)
        if (deg == 0).any():
            raise DataError("graph has an isolated vertex; it is malformed")
        if d2 is None:
            d2 = pairwise_sq_dists(dataset.X)
        logits = np.where(A, -d2 / (2.0 * sigma * sigma), -np.inf)
        # per-row shift by the nearest neighbor's logit; without it a tiny
        # bandwidth underflows every kernel weight in a row to zero at once
        K = np.exp(logits - logits.max(axis=1)[:, None])
        total = K.sum(axis=1)
        return (K * same).sum(axis=1) / total
    raise DataError(f"unknown membership kind: {kind!r}")


def class_thresholds(memberships: np.ndarray, labels: np.ndarray, class_count: int | None = None) -> np.ndarray:
    """Per-class mean membership, used as the removal threshold."""
    memberships = np.asarray(memberships, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if memberships.shape != labels.shape or memberships.ndim != 1:
        raise DataError("memberships and labels must be equal-length vectors")
    c = int(labels.max()) + 1 if class_count is None else int(class_count)
    out = np.empty(c, dtype=np.float64)
    for cls in range(c):
        mask = labels == cls
        if not mask.any():
            raise EmptyClassError(f"class {cls} has no samples; threshold undefined")
        out[cls] = memberships[mask].mean()
    return out


@dataclass(frozen=True)
class FilterModel:
    """A fitted filtering rule: memberships plus the policy that consumes them.

    ``policy`` is ``"threshold"`` (remove samples strictly below their class
    mean, carried in ``thresholds``) or ``"count"`` (remove the ``counts[c]``
    lowest-membership samples of each class).  ``sigma`` records the kernel
    bandwidth when the memberships are distance-based, ``None`` for the
    cardinality form.
    """

    memberships: np.ndarray
    policy: str
    thresholds: np.ndarray | None = None
    counts: np.ndarray | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        memb = np.asarray(self.memberships, dtype=np.float64)
        if memb.ndim != 1 or memb.size == 0:
            raise DataError("memberships must be a non-empty vector")
        if memb.min() < 0 or memb.max() > 1:
            raise DataError("memberships must lie in [0, 1]")
        if self.policy not in POLICIES:
            raise DataError(f"unknown filter policy: {self.policy!r}")
        if self.policy == "threshold":
            if self.thresholds is None:
                raise DataError("threshold policy needs per-class thresholds")
            thr = np.asarray(self.thresholds, dtype=np.float64)
            if thr.min() < 0 or thr.max() > 1:
                raise DataError("thresholds must lie in [0, 1]")
            object.__setattr__(self, "thresholds", thr)
        if self.policy == "count":
            if self.counts is None:
                raise DataError("count policy needs per-class removal counts")
            cnt = np.asarray(self.counts, dtype=np.intp)
            if cnt.min() < 0:
                raise DataError("removal counts must be non-negative")
            object.__setattr__(self, "counts", cnt)
        if self.sigma is not None and self.sigma <= 0:
            raise DataError("sigma must be positive when given")
        object.__setattr__(self, "memberships", memb)

    def describe(self) -> str:
        if self.policy == "threshold":
            return "threshold"
        return f"count(r={','.join(str(int(r)) for r in self.counts)})"


def filter_samples(dataset: Dataset, filter_model: FilterModel):
    """Split the dataset's indices into (kept, removed) under the policy.

    Threshold policy removes sample i when membership[i] is strictly below
    its class threshold; equal-to-threshold samples survive.  Count policy
    removes the requested number of lowest-membership samples per class,
    breaking membership ties toward the lower index.  At least one sample of
    every class always survives: a removal that would empty a class is
    truncated to spare its best-scoring sample, with a warning.
    """
    memb = filter_model.memberships
    if memb.shape != (dataset.m,):
        raise DataError("filter memberships were computed for a different dataset")
    removed_mask = np.zeros(dataset.m, dtype=bool)
    if filter_model.policy == "threshold":
        thr = filter_model.thresholds
        if thr.shape != (dataset.class_count,):
            raise DataError(
                f"expected {dataset.class_count} thresholds, got {thr.shape[0]}"
            )
        removed_mask = memb < thr[dataset.y]
    else:
        cnt = filter_model.counts
        if cnt.shape != (dataset.class_count,):
            raise DataError(f"expected {dataset.class_count} counts, got {cnt.shape[0]}")
        for cls in range(dataset.class_count):
            members = dataset.class_indices(cls)
            r = int(cnt[cls])
            if r == 0:
                continue
            if r >= members.size:
                raise DataError(
                    f"cannot remove {r} samples from class {cls} of size {members.size}"
                )
            order = members[np.lexsort((members, memb[members]))]
            removed_mask[order[:r]] = True

    for cls in range(dataset.class_count):
        members = dataset.class_indices(cls)
        if members.size and removed_mask[members].all():
            best = members[np.lexsort((members, -memb[members]))][0]
            removed_mask[best] = False
            warnings.warn(
                f"filter would remove every sample of class {cls}; "
                f"keeping its highest-membership sample (index {int(best)})",
                stacklevel=2,
            )
    kept = np.flatnonzero(~removed_mask)
    removed = np.flatnonzero(removed_mask)
    return kept, removed


def membership_report(
    graph: GabrielGraph,
    dataset: Dataset,
    sigma: float,
    active_kind: str = "distance",
    policy: str = "threshold",
    counts: np.ndarray | None = None,
) -> list[dict]:
    """Per-sample rows for a membership CSV export.

    Each row carries both membership forms, the active kind's class
    threshold, and whether the active policy removes the sample.
    """
    q = all_memberships(graph, dataset, "cardinality")
    qd = all_memberships(graph, dataset, "distance", sigma=sigma)
    active = qd if active_kind == "distance" else q
    thresholds = class_thresholds(active, dataset.y, dataset.class_count)
    if policy == "threshold":
        model = FilterModel(active, "threshold", thresholds=thresholds,
                            sigma=sigma if active_kind == "distance" else None)
    else:
        if counts is None:
            raise DataError("count policy needs per-class counts")
        model = FilterModel(active, "count", counts=counts,
                            sigma=sigma if active_kind == "distance" else None)
    _, removed = filter_samples(dataset, model)
    removed_set = set(int(i) for i in removed)
    rows = []
    for i in range(dataset.m):
        rows.append(
            {
                "sample_index": int(graph.sample_ids[i]),
                "class": dataset.class_labels[dataset.y[i]],
                "q": float(q[i]),
                "q_d": float(qd[i]),
                "threshold": float(thresholds[dataset.y[i]]),
                "removed_flag": int(i in removed_set),
            }
        )
    return rows
