"""Shared numerical kernels.

Squared-distance computation, the minimum-norm least-squares solver used for
output-weight training, stable elementary functions, and the evaluation
metrics (binary AUC and one-vs-one ROC-AUC).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DataError, NumericalError, UndefinedMetricError

__all__ = [
    "pairwise_sq_dists",
    "LeastSquaresProblem",
    "solve_least_squares",
    "stable_sigmoid",
    "auc_binary",
    "roc_auc_ovo",
    "MetricReport",
]


def pairwise_sq_dists(A: np.ndarray, B: np.ndarray | None = None, block: int = 256) -> np.ndarray:
    """Squared Euclidean distances between rows of ``A`` and rows of ``B``.

    Computed from explicit row differences in fixed-size row blocks.  The
    value of entry (j, k) depends only on rows j and k, so slicing a matrix
    out of a larger one and recomputing gives bitwise-identical entries; the
    graph recomputation path relies on that.
    """
    A = np.asarray(A, dtype=np.float64)
    B = A if B is None else np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise DataError(f"incompatible shapes for distance computation: {A.shape} vs {B.shape}")
    out = np.empty((A.shape[0], B.shape[0]), dtype=np.float64)
    for start in range(0, A.shape[0], block):
        stop = min(start + block, A.shape[0])
        diff = A[start:stop, None, :] - B[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


@dataclass(frozen=True)
class LeastSquaresProblem:
    """Least-squares system ``design @ w ~ targets``.

    ``rank_tolerance`` is the relative singular-value cutoff: singular values
    below ``rank_tolerance * s_max`` are treated as zero, which makes the
    solution the minimum-norm one on rank-deficient systems.
    """

    design: np.ndarray
    targets: np.ndarray
    rank_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        H = np.asarray(self.design, dtype=np.float64)
        Y = np.asarray(self.targets, dtype=np.float64)
        if H.ndim != 2 or H.shape[0] < 1 or H.shape[1] < 1:
            raise DataError(f"design matrix must be 2-d and non-empty, got shape {H.shape}")
        if Y.shape[0] != H.shape[0] or Y.ndim not in (1, 2):
            raise DataError(f"targets shape {Y.shape} does not match design {H.shape}")
        if not np.all(np.isfinite(H)) or not np.all(np.isfinite(Y)):
            raise NumericalError("least-squares input contains non-finite values")
        if not (0 < self.rank_tolerance < 1):
            raise DataError("rank_tolerance must lie in (0, 1)")
        object.__setattr__(self, "design", H)
        object.__setattr__(self, "targets", Y)


def solve_least_squares(problem: LeastSquaresProblem) -> np.ndarray:
    """Minimum-norm least-squares solution of ``design @ w ~ targets``.

    Solved through an SVD-based factorization; the returned array has shape
    (s,) for vector targets and (s, c) for matrix targets.
    """
    w, _, _, _ = np.linalg.lstsq(problem.design, problem.targets, rcond=problem.rank_tolerance)
    if not np.all(np.isfinite(w)):
        raise NumericalError("least-squares solution is non-finite")
    return w


def stable_sigmoid(z):
    """Logistic function 1/(1+exp(-z)) computed without overflow.

    Accepts scalars or arrays; the positive and negative branches are
    evaluated separately so exp() never sees a positive argument.
    """
    z_arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z_arr)):
        raise NumericalError("sigmoid input must be finite")
    out = np.empty_like(z_arr)
    pos = z_arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z_arr[pos]))
    ez = np.exp(z_arr[~pos])
    out[~pos] = ez / (1.0 + ez)
    if np.isscalar(z) or np.ndim(z) == 0:
        return float(out)
    return out


def auc_binary(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve via the rank-sum (Mann-Whitney) statistic.

    Equals P(score of a positive > score of a negative) with half credit for
    ties.  ``labels`` must be a binary 0/1 (or boolean) vector with both
    classes present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError(f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors")
    if not np.all(np.isfinite(scores)):
        raise NumericalError("AUC scores must be finite")
    pos = labels.astype(bool)
    n_pos = int(pos.sum())
    n_neg = int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC undefined: only one class present")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_auc_ovo(probabilities: np.ndarray, labels: np.ndarray) -> float:
    """Macro one-vs-one ROC-AUC over all unordered class pairs.

    For each pair (a, b) the samples labeled a or b are kept; A(a|b) is the
    binary AUC of the column-a probabilities with a positive, A(b|a) the
    symmetric value, and the pair contributes their average.  The result is
    the unweighted mean over pairs.
    """
    P = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels)
    if P.ndim != 2 or P.shape[1] < 2:
        raise DataError(f"probability matrix must be (m, c) with c >= 2, got {P.shape}")
    if labels.shape != (P.shape[0],):
        raise DataError("labels length does not match probability rows")
    if not np.allclose(P.sum(axis=1), 1.0, atol=1e-6):
        raise DataError("probability rows must sum to 1")
    c = P.shape[1]
    present = np.unique(labels)
    missing = [k for k in range(c) if k not in present]
    if missing:
        raise UndefinedMetricError(f"classes absent from evaluation set: {missing}")
    pair_scores = []
    for a in range(c):
        for b in range(a + 1, c):
            mask = (labels == a) | (labels == b)
            a_vs_b = auc_binary(P[mask, a], labels[mask] == a)
            b_vs_a = auc_binary(P[mask, b], labels[mask] == b)
            pair_scores.append(0.5 * (a_vs_b + b_vs_a))
    return float(np.mean(pair_scores))


@dataclass(frozen=True)
class MetricReport:
    """Per-fold metric values with their aggregate mean and deviation.

    ``details`` optionally carries one record per fold (chosen
    hyperparameters, support sizes, fallback flags); ``extras`` holds
    report-level annotations such as the positive-label orientation.
    """

    metric_name: str
    fold_values: tuple
    mean: float
    std: float
    details: tuple = ()
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, metric_name: str, values, details=(), extras=None) -> "MetricReport":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise DataError("metric report needs at least one fold value")
        if any(not (0.0 <= v <= 1.0) for v in vals):
            raise DataError("metric values must lie in [0, 1]")
        arr = np.asarray(vals)
        return cls(
            metric_name=metric_name,
            fold_values=vals,
            mean=float(arr.mean()),
            std=float(arr.std()),
            details=tuple(details),
            extras=dict(extras or {}),
        )
