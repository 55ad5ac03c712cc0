"""Dataset container and feature preprocessing.

A :class:`Dataset` holds an immutable float64 feature matrix together with
integer class ids and the original label names.  Class ids are dense, i.e.
``y[i]`` indexes into ``class_labels``.  Feature rows must be pairwise
distinct: diametral-sphere adjacency is undefined for coincident samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DuplicateSampleError


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus labels.

    Parameters
    ----------
    X : (m, n) float64 array, all entries finite, rows pairwise distinct.
    y : (m,) integer array with values in ``[0, len(class_labels))``.
    class_labels : original label names; position equals class id.
    """

    X: np.ndarray
    y: np.ndarray
    class_labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.intp)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise DataError(f"feature matrix must be 2-d and non-empty, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"labels have shape {y.shape}, expected ({X.shape[0]},)")
        if not np.all(np.isfinite(X)):
            raise DataError("feature matrix contains non-finite values")
        labels = tuple(str(name) for name in self.class_labels)
        if not labels:
            labels = tuple(str(c) for c in range(int(y.max()) + 1 if y.size else 0))
        if y.min() < 0 or y.max() >= len(labels):
            raise DataError(
                f"class ids must lie in [0, {len(labels)}), got range [{y.min()}, {y.max()}]"
            )
        if np.unique(X, axis=0).shape[0] != X.shape[0]:
            dupes = _duplicate_rows(X)
            raise DuplicateSampleError(
                f"feature rows are not pairwise distinct (e.g. rows {dupes[0][0]} and {dupes[0][1]})"
            )
        object.__setattr__(self, "X", _as_readonly(X))
        object.__setattr__(self, "y", _as_readonly(y))
        object.__setattr__(self, "class_labels", labels)

    @property
    def m(self) -> int:
        """Number of samples."""
        return self.X.shape[0]

    @property
    def n(self) -> int:
        """Number of features."""
        return self.X.shape[1]

    @property
    def class_count(self) -> int:
        return len(self.class_labels)

    def class_indices(self, c: int) -> np.ndarray:
        """Indices of all samples with class id ``c``, ascending."""
        return np.flatnonzero(self.y == c)

    def subset(self, indices: np.ndarray | list[int]) -> "Dataset":
        """New dataset restricted to ``indices`` (order preserved)."""
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.X[idx], self.y[idx], self.class_labels)


def _duplicate_rows(X: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs of identical rows, for error messages."""
    order = np.lexsort(X.T[::-1])
    pairs = []
    for a, b in zip(order[:-1], order[1:]):
        if np.array_equal(X[a], X[b]):
            pairs.append((min(a, b), max(a, b)))
    return pairs


@dataclass(frozen=True)
class Preprocessing:
    """Per-feature affine transform fitted on training data.

    ``kept_columns`` lists the raw feature columns that survived the
    zero-variance drop; ``means`` and ``stds`` are aligned with it.
    ``n_raw`` is the raw feature count the transform expects, so a query of
    the wrong width fails loudly instead of being silently sliced.
    """

    means: np.ndarray
    stds: np.ndarray
    kept_columns: np.ndarray
    n_raw: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "means", _as_readonly(np.asarray(self.means, dtype=np.float64)))
        object.__setattr__(self, "stds", _as_readonly(np.asarray(self.stds, dtype=np.float64)))
        object.__setattr__(
            self, "kept_columns", _as_readonly(np.asarray(self.kept_columns, dtype=np.intp))
        )
        object.__setattr__(self, "n_raw", int(self.n_raw))
        if not (self.means.shape == self.stds.shape == self.kept_columns.shape):
            raise DataError("preprocessing fields must have identical shapes")
        if np.any(self.stds <= 0):
            raise DataError("preprocessing stds must be strictly positive")
        if self.kept_columns.size and (
            self.kept_columns.min() < 0 or self.kept_columns.max() >= self.n_raw
        ):
            raise DataError("kept_columns must index into the raw feature range")

    @classmethod
    def identity(cls, n: int) -> "Preprocessing":
        """No-op transform for data that is already standardized."""
        return cls(np.zeros(n), np.ones(n), np.arange(n), n)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Select kept columns, subtract means, divide by stds."""
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.n_raw:
            raise DataError(f"expected {self.n_raw} raw features, got {X.shape[-1]}")
        if X.ndim == 1:
            X = X[None, :]
            return ((X[:, self.kept_columns] - self.means) / self.stds)[0]
        return (X[:, self.kept_columns] - self.means) / self.stds

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "kept_columns": self.kept_columns.tolist(),
            "n_raw": self.n_raw,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Preprocessing":
        return cls(
            np.asarray(d["means"], dtype=np.float64),
            np.asarray(d["stds"], dtype=np.float64),
            np.asarray(d["kept_columns"], dtype=np.intp),
            int(d["n_raw"]),
        )
