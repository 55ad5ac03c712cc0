"""Margin classifiers built on the support structure of a Gabriel graph.

Three architectures share the same ingredients:

* ``chipclass-exp`` — activations centered on support-edge midpoints, with an
  inverse-distance exponential profile; each edge votes +1 or -1 depending on
  which of its two endpoints is closer to the query, and the vote is weighted
  by the normalized activation.  No trained weights at all.
* ``chipclass-tanh`` — same voting scheme, but the activation profile is the
  bounded ``tanh(-d) + 1`` form, which decays polynomially instead of
  exploding near centers.
* ``ssv-binary`` / ``ssv-multiclass`` — a single-hidden-layer network whose
  hidden units are the structural support vectors themselves (tanh
  activations, normalized per query); output weights come from the
  minimum-norm least-squares solution, or optionally from full-batch
  gradient descent on softmax cross-entropy in the multiclass case.

Everything here operates in the standardized feature space; only
:func:`predict_proba` accepts raw features and applies the model's stored
preprocessing itself.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dataset import Dataset, Preprocessing
from .errors import DataError, EmptySupportError, NumericalError
from .graph import SupportEdge, SupportStructure
from .numeric import LeastSquaresProblem, pairwise_sq_dists, solve_least_squares, stable_sigmoid

__all__ = [
    "ARCHITECTURES",
    "ActivationVector",
    "EdgeEndpoints",
    "TrainedModel",
    "softmax",
    "chip_activation",
    "chip_activation_derivative",
    "tanh_activation",
    "tanh_activation_raw",
    "chip_edge_weight",
    "build_chipclass",
    "chipclass_predict",
    "fit_ssv_binary",
    "fit_multiclass",
    "predict_proba",
]

ARCHITECTURES = ("chipclass-exp", "chipclass-tanh", "ssv-binary", "ssv-multiclass")


@dataclass(frozen=True)
class ActivationVector:
    """Activation values of one query against a set of centers."""

    values: np.ndarray
    normalized: bool

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise DataError("activation values must form a non-empty vector")
        if not np.all(np.isfinite(v)):
            raise NumericalError("activation values must be finite")
        if self.normalized and abs(v.sum() - 1.0) > 1e-9:
            raise NumericalError(f"normalized activations sum to {v.sum()!r}, expected 1")
        object.__setattr__(self, "values", v)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax (subtracts the row maximum before exp)."""
    Z = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(Z)):
        raise NumericalError("softmax input must be finite")
    one_d = Z.ndim == 1
    Z2 = Z[None, :] if one_d else Z
    shifted = Z2 - Z2.max(axis=1, keepdims=True)
    E = np.exp(shifted)
    P = E / E.sum(axis=1, keepdims=True)
    return P[0] if one_d else P


def _query_center_distances(X: np.ndarray, centers: np.ndarray):
    X = np.asarray(X, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] < 1:
        raise DataError(f"centers must be a non-empty matrix, got shape {centers.shape}")
    one_d = X.ndim == 1
    X2 = X[None, :] if one_d else X
    if X2.shape[1] != centers.shape[1]:
        raise DataError(
            f"query dimension {X2.shape[1]} does not match center dimension {centers.shape[1]}"
        )
    return np.sqrt(pairwise_sq_dists(X2, centers)), one_d


def chip_activation_matrix(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Normalized inverse-distance exponential activations, one row per query.

    Row activations are proportional to exp(m_d^2 / d_k) where d_k is the
    query's distance to center k and m_d its largest center distance.  The
    raw exponential overflows as d_k shrinks, so rows are normalized in the
    log domain.  A query at distance exactly zero from some center takes the
    limit value: all weight on the coincident center(s), zero elsewhere.
    """
    D, one_d = _query_center_distances(X, centers)
    out = np.empty_like(D)
    zero_rows = (D == 0.0).any(axis=1)
    ok = ~zero_rows
    if ok.any():
        md = D[ok].max(axis=1)
        logits = (md[:, None] ** 2) / D[ok]
        out[ok] = softmax(logits)
    for r in np.flatnonzero(zero_rows):
        hits = D[r] == 0.0
        out[r] = 0.0
        out[r, hits] = 1.0 / hits.sum()
    return out[0] if one_d else out


def chip_activation(x: np.ndarray, centers: np.ndarray) -> ActivationVector:
    """Normalized inverse-distance exponential activation of one query."""
    return ActivationVector(chip_activation_matrix(x, centers), normalized=True)


def chip_activation_derivative(x: np.ndarray, center: np.ndarray, m_d: float) -> float:
    """Derivative of the unnormalized exponential activation w.r.t. distance.

    With d = ||x - center|| and e(d) = exp(m_d^2 / d), returns
    e'(d) = -m_d^2 * exp(m_d^2 / d) / d^2.  Used to verify the activation's
    sensitivity near centers against finite differences.
    """
    if m_d <= 0:
        raise DataError(f"m_d must be positive, got {m_d}")
    x = np.asarray(x, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if x.shape != center.shape or x.ndim != 1:
        raise DataError("x and center must be equal-length vectors")
    d = float(np.sqrt(((x - center) ** 2).sum()))
    if d == 0.0:
        raise NumericalError("derivative undefined at zero distance")
    return float(-(m_d**2) * np.exp(m_d**2 / d) / d**2)


def _tanh_log_raw(D: np.ndarray) -> np.ndarray:
    # log(tanh(-d) + 1) = log(2) - 2d - log1p(exp(-2d)), exact for all d >= 0
    return np.log(2.0) - 2.0 * D - np.log1p(np.exp(-2.0 * D))


def tanh_activation_matrix(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Normalized bounded activations tanh(-d)+1, one row per query.

    Normalization happens in the log domain, which keeps every entry
    strictly positive even for queries far from all centers.
    """
    D, one_d = _query_center_distances(X, centers)
    out = softmax(_tanh_log_raw(D))
    return out[0] if one_d else out


def tanh_activation(x: np.ndarray, centers: np.ndarray) -> ActivationVector:
    """Normalized bounded activation of one query."""
    return ActivationVector(tanh_activation_matrix(x, centers), normalized=True)


def tanh_activation_raw(x: np.ndarray, centers: np.ndarray) -> ActivationVector:
    """Unnormalized activations tanh(-d)+1, each in (0, 1]."""
    D, _ = _query_center_distances(x, centers)
    return ActivationVector(np.tanh(-D[0]) + 1.0, normalized=False)


@dataclass(frozen=True)
class EdgeEndpoints:
    """Per-edge endpoint records of a chipclass model.

    ``alpha`` holds the positive-class endpoint of each support edge (the
    endpoint with the larger class id), ``beta`` the other one.  The original
    sample indices break exact distance ties deterministically.
    """

    alpha: np.ndarray
    beta: np.ndarray
    alpha_class: np.ndarray
    beta_class: np.ndarray
    alpha_index: np.ndarray
    beta_index: np.ndarray

    @classmethod
    def from_support(cls, support: SupportStructure) -> "EdgeEndpoints":
        alpha, beta, acls, bcls, aidx, bidx = [], [], [], [], [], []
        for e in support.edges:
            if e.class_j > e.class_k:
                a_x, b_x = e.x_j, e.x_k
                a_c, b_c = e.class_j, e.class_k
                a_i, b_i = e.orig_j, e.orig_k
            else:
                a_x, b_x = e.x_k, e.x_j
                a_c, b_c = e.class_k, e.class_j
                a_i, b_i = e.orig_k, e.orig_j
            alpha.append(a_x)
            beta.append(b_x)
            acls.append(a_c)
            bcls.append(b_c)
            aidx.append(a_i)
            bidx.append(b_i)
        return cls(
            alpha=np.asarray(alpha, dtype=np.float64),
            beta=np.asarray(beta, dtype=np.float64),
            alpha_class=np.asarray(acls, dtype=np.intp),
            beta_class=np.asarray(bcls, dtype=np.intp),
            alpha_index=np.asarray(aidx, dtype=np.intp),
            beta_index=np.asarray(bidx, dtype=np.intp),
        )

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "alpha_class": self.alpha_class.tolist(),
            "beta_class": self.beta_class.tolist(),
            "alpha_index": self.alpha_index.tolist(),
            "beta_index": self.beta_index.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EdgeEndpoints":
        return cls(
            alpha=np.asarray(d["alpha"], dtype=np.float64),
            beta=np.asarray(d["beta"], dtype=np.float64),
            alpha_class=np.asarray(d["alpha_class"], dtype=np.intp),
            beta_class=np.asarray(d["beta_class"], dtype=np.intp),
            alpha_index=np.asarray(d["alpha_index"], dtype=np.intp),
            beta_index=np.asarray(d["beta_index"], dtype=np.intp),
        )


def chip_edge_weight(x: np.ndarray, edge: SupportEdge) -> int:
    """Vote of one support edge for a query: +1 toward the positive endpoint.

    The positive endpoint is the one with the larger class id.  Returns +1
    when the query is strictly closer to it, -1 when strictly closer to the
    other endpoint; an exact tie goes to +1 only if the positive endpoint's
    original sample index is the smaller one.
    """
    x = np.asarray(x, dtype=np.float64)
    if edge.class_j > edge.class_k:
        a_x, b_x, a_i, b_i = edge.x_j, edge.x_k, edge.orig_j, edge.orig_k
    else:
        a_x, b_x, a_i, b_i = edge.x_k, edge.x_j, edge.orig_k, edge.orig_j
    da = float(((x - a_x) ** 2).sum())
    db = float(((x - b_x) ** 2).sum())
    if da < db:
        return 1
    if da > db:
        return -1
    return 1 if a_i < b_i else -1


def _edge_weight_matrix(X: np.ndarray, edges: EdgeEndpoints) -> np.ndarray:
    DA = pairwise_sq_dists(X, edges.alpha)
    DB = pairwise_sq_dists(X, edges.beta)
    W = np.where(DA < DB, 1.0, -1.0)
    ties = DA == DB
    if ties.any():
        tie_sign = np.where(edges.alpha_index < edges.beta_index, 1.0, -1.0)
        W[ties] = np.broadcast_to(tie_sign, W.shape)[ties]
    return W


@dataclass(frozen=True)
class TrainedModel:
    """A fitted classifier, self-contained for prediction and serialization.

    ``centers`` are support-edge midpoints for chipclass variants and
    structural support vectors for ssv variants, always in standardized
    space.  ``weights`` is absent for chipclass (votes are recomputed per
    query), a vector for ssv-binary, and an (s, c) matrix for
    ssv-multiclass.  ``edges`` carries the endpoint records chipclass voting
    needs.  ``sigma_used`` and ``filter_policy`` record how the training data
    was filtered, for reporting only.
    """

    architecture: str
    centers: np.ndarray
    weights: np.ndarray | None
    preprocessing: Preprocessing
    class_labels: tuple
    center_classes: np.ndarray | None = None
    edges: EdgeEndpoints | None = None
    sigma_used: float | None = None
    filter_policy: str | None = None
    gradient_converged: bool | None = None
    loss_history: tuple = ()

    def __post_init__(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise DataError(f"unknown architecture {self.architecture!r}")
        centers = np.asarray(self.centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] < 1:
            raise DataError("model needs at least one activation center")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "class_labels", tuple(str(s) for s in self.class_labels))
        if len(self.class_labels) < 2:
            raise DataError("model needs at least two classes")
        if self.architecture.startswith("chipclass"):
            if self.edges is None or self.weights is not None:
                raise DataError("chipclass models carry edge records and no trained weights")
            if self.edges.alpha.shape != centers.shape:
                raise DataError("edge records are not aligned with centers")
            if len(self.class_labels) != 2:
                raise DataError("chipclass is a two-class architecture")
        else:
            if self.weights is None or self.center_classes is None:
                raise DataError("ssv models need weights and per-center classes")
            w = np.asarray(self.weights, dtype=np.float64)
            if not np.all(np.isfinite(w)):
                raise NumericalError("model weights must be finite")
            expected = (centers.shape[0],) if self.architecture == "ssv-binary" else (
                centers.shape[0],
                len(self.class_labels),
            )
            if w.shape != expected:
                raise DataError(f"weights shape {w.shape}, expected {expected}")
            object.__setattr__(self, "weights", w)

    @property
    def class_count(self) -> int:
        return len(self.class_labels)

    def to_dict(self) -> dict:
        if self.architecture.startswith("chipclass"):
            center_classes = self.edges.to_dict()
        else:
            center_classes = self.center_classes.tolist()
        return {
            "architecture": self.architecture,
            "centers": self.centers.tolist(),
            "center_classes": center_classes,
            "weights": None if self.weights is None else self.weights.tolist(),
            "preprocessing": self.preprocessing.to_dict(),
            "class_labels": list(self.class_labels),
            "sigma_used": self.sigma_used,
            "filter_policy": self.filter_policy,
            "gradient_converged": self.gradient_converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        arch = d["architecture"]
        if arch.startswith("chipclass"):
            edges = EdgeEndpoints.from_dict(d["center_classes"])
            center_classes = None
        else:
            edges = None
            center_classes = np.asarray(d["center_classes"], dtype=np.intp)
        weights = d["weights"]
        return cls(
            architecture=arch,
            centers=np.asarray(d["centers"], dtype=np.float64),
            weights=None if weights is None else np.asarray(weights, dtype=np.float64),
            preprocessing=Preprocessing.from_dict(d["preprocessing"]),
            class_labels=tuple(d["class_labels"]),
            center_classes=center_classes,
            edges=edges,
            sigma_used=d.get("sigma_used"),
            filter_policy=d.get("filter_policy"),
            gradient_converged=d.get("gradient_converged"),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TrainedModel":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read model {path}: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"model file {path} is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise DataError(f"model file {path} must hold a JSON object")
        return cls.from_dict(payload)


def build_chipclass(
    dataset: Dataset,
    support: SupportStructure,
    activation: str = "exp",
    preprocessing: Preprocessing | None = None,
    sigma_used: float | None = None,
    filter_policy: str | None = None,
) -> TrainedModel:
    """Assemble a chipclass model from a support structure.

    There is nothing to train: the model is the set of support-edge
    midpoints and endpoint records.  ``activation`` picks the exponential or
    tanh profile.
    """
    if support.empty:
        raise EmptySupportError("cannot build a classifier without support edges")
    if activation not in ("exp", "tanh"):
        raise DataError(f"unknown activation {activation!r}")
    if dataset.class_count != 2:
        raise DataError("chipclass is a two-class architecture")
    centers = np.vstack([e.midpoint for e in support.edges])
    return TrainedModel(
        architecture=f"chipclass-{activation}",
        centers=centers,
        weights=None,
        preprocessing=preprocessing if preprocessing is not None else Preprocessing.identity(dataset.n),
        class_labels=dataset.class_labels,
        edges=EdgeEndpoints.from_support(support),
        sigma_used=sigma_used,
        filter_policy=filter_policy,
    )


def _chipclass_scores(model: TrainedModel, X_std: np.ndarray) -> np.ndarray:
    if model.architecture == "chipclass-exp":
        H = chip_activation_matrix(X_std, model.centers)
    else:
        H = tanh_activation_matrix(X_std, model.centers)
    H = H[None, :] if H.ndim == 1 else H
    X2 = X_std[None, :] if X_std.ndim == 1 else X_std
    V = _edge_weight_matrix(X2, model.edges)
    return (H * V).sum(axis=1)


def chipclass_predict(model: TrainedModel, x: np.ndarray) -> float:
    """Probability of the positive (larger-id) class for one standardized query."""
    if not model.architecture.startswith("chipclass"):
        raise DataError(f"chipclass_predict needs a chipclass model, got {model.architecture!r}")
    score = _chipclass_scores(model, np.asarray(x, dtype=np.float64))
    return float(stable_sigmoid(float(score[0])))


def fit_ssv_binary(
    dataset: Dataset,
    support: SupportStructure,
    preprocessing: Preprocessing | None = None,
    sigma_used: float | None = None,
    filter_policy: str | None = None,
) -> TrainedModel:
    """Least-squares output weights over structural support vector activations.

    Builds the activation matrix H of every training sample against every
    SSV (normalized tanh activations), encodes labels as +/-1 with the
    larger class id positive, and solves H w ~ y by minimum-norm least
    squares.
    """
    if support.empty:
        raise EmptySupportError("cannot fit without support edges")
    if dataset.class_count != 2:
        raise DataError("ssv-binary needs exactly two classes")
    H = tanh_activation_matrix(dataset.X, support.ssv_centers)
    y = np.where(dataset.y == 1, 1.0, -1.0)
    w = solve_least_squares(LeastSquaresProblem(H, y))
    return TrainedModel(
        architecture="ssv-binary",
        centers=np.asarray(support.ssv_centers, dtype=np.float64),
        weights=w,
        preprocessing=preprocessing if preprocessing is not None else Preprocessing.identity(dataset.n),
        class_labels=dataset.class_labels,
        center_classes=np.asarray(support.ssv_classes, dtype=np.intp),
        sigma_used=sigma_used,
        filter_policy=filter_policy,
    )


def _cross_entropy(H: np.ndarray, W: np.ndarray, Y: np.ndarray) -> float:
    logits = H @ W
    log_z = logsumexp(logits, axis=1)
    return float(-((logits * Y).sum(axis=1) - log_z).mean())


def fit_multiclass(
    dataset: Dataset,
    support: SupportStructure,
    mode: str = "pseudoinverse",
    init: str = "pseudoinverse",
    step: float = 0.1,
    max_epochs: int = 500,
    tol: float = 1e-6,
    preprocessing: Preprocessing | None = None,
    sigma_used: float | None = None,
    filter_policy: str | None = None,
) -> TrainedModel:
    """Multiclass SSV network trained on one-hot targets.

    ``mode="pseudoinverse"`` solves H W ~ Y directly.  ``mode="gradient"``
    runs full-batch gradient descent on the softmax cross-entropy, starting
    from the pseudoinverse solution or zeros, with a fixed step and
    step-halving whenever a step would increase the loss; training stops when
    an accepted step improves the loss by less than ``tol``.  If the epoch
    budget runs out first, the best weights so far are returned and a warning
    is emitted.
    """
    if support.empty:
        raise EmptySupportError("cannot fit without support edges")
    if mode not in ("pseudoinverse", "gradient"):
        raise DataError(f"unknown training mode {mode!r}")
    if init not in ("pseudoinverse", "zeros"):
        raise DataError(f"unknown init {init!r}")
    if step <= 0 or max_epochs < 1 or tol < 0:
        raise DataError("invalid gradient-mode hyperparameters")
    c = dataset.class_count
    H = tanh_activation_matrix(dataset.X, support.ssv_centers)
    Y = np.zeros((dataset.m, c), dtype=np.float64)
    Y[np.arange(dataset.m), dataset.y] = 1.0

    W = solve_least_squares(LeastSquaresProblem(H, Y))
    converged = None
    history: tuple = ()
    if mode == "gradient":
        if init == "zeros":
            W = np.zeros_like(W)
        cur = _cross_entropy(H, W, Y)
        losses = [cur]
        converged = False
        for _ in range(max_epochs):
            G = H.T @ (softmax(H @ W) - Y) / dataset.m
            trial_step = step
            W_try = W - trial_step * G
            new = _cross_entropy(H, W_try, Y)
            while new > cur and trial_step > 1e-12:
                trial_step /= 2.0
                W_try = W - trial_step * G
                new = _cross_entropy(H, W_try, Y)
            if new > cur:
                converged = True  # no descent direction left at any step size
                break
            improvement = cur - new
            W, cur = W_try, new
            losses.append(cur)
            if improvement < tol:
                converged = True
                break
        history = tuple(losses)
        if not converged:
            warnings.warn(
                f"gradient training hit the {max_epochs}-epoch budget before the "
                f"loss improvement fell under {tol}; returning the best weights so far",
                stacklevel=2,
            )
    return TrainedModel(
        architecture="ssv-multiclass",
        centers=np.asarray(support.ssv_centers, dtype=np.float64),
        weights=W,
        preprocessing=preprocessing if preprocessing is not None else Preprocessing.identity(dataset.n),
        class_labels=dataset.class_labels,
        center_classes=np.asarray(support.ssv_classes, dtype=np.intp),
        sigma_used=sigma_used,
        filter_policy=filter_policy,
        gradient_converged=converged,
        loss_history=history,
    )


def predict_proba(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Class probabilities for raw-feature queries.

    Applies the model's preprocessing, then dispatches on the architecture:
    chipclass and ssv-binary produce (P(class 0), P(class 1)); the multiclass
    network a softmax row per query.  A single query vector yields a single
    probability vector.
    """
    X = np.asarray(X, dtype=np.float64)
    one_d = X.ndim == 1
    X_std = model.preprocessing.transform(X)
    X2 = X_std[None, :] if one_d else X_std
    if model.architecture.startswith("chipclass"):
        p = stable_sigmoid(_chipclass_scores(model, X2))
        out = np.column_stack([1.0 - p, p])
    elif model.architecture == "ssv-binary":
        H = tanh_activation_matrix(X2, model.centers)
        p = stable_sigmoid(H @ model.weights)
        out = np.column_stack([1.0 - p, p])
    else:
        H = tanh_activation_matrix(X2, model.centers)
        out = softmax(H @ model.weights)
    return out[0] if one_d else out
