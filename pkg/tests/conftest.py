"""Shared helpers for the test suite.

The graph oracle here is deliberately written in a different form from the
library: a sample blocks a pair exactly when it sees the pair's endpoints
under an obtuse angle (Thales), so the tests compare two independent
derivations of the same geometric predicate.
"""

from __future__ import annotations

import numpy as np

from ggmargin import Dataset


def brute_force_adjacency(X: np.ndarray) -> np.ndarray:
    """O(m^3) Gabriel adjacency straight from the diametral-sphere definition.

    Point i lies strictly inside the sphere with diameter (X_j, X_k) iff
    (X_i - X_j) . (X_i - X_k) < 0.  Boundary contacts (zero dot product) do
    not block.
    """
    X = np.asarray(X, dtype=np.float64)
    m = X.shape[0]
    adj = np.zeros((m, m), dtype=bool)
    for j in range(m):
        for k in range(j + 1, m):
            blocked = False
            for i in range(m):
                if i == j or i == k:
                    continue
                if float(np.dot(X[i] - X[j], X[i] - X[k])) < 0.0:
                    blocked = True
                    break
            adj[j, k] = adj[k, j] = not blocked
    return adj


def brute_force_witnesses(X: np.ndarray, j: int, k: int) -> int:
    """Count of samples strictly inside the (j, k) sphere, by definition."""
    X = np.asarray(X, dtype=np.float64)
    count = 0
    for i in range(X.shape[0]):
        if i == j or i == k:
            continue
        if float(np.dot(X[i] - X[j], X[i] - X[k])) < 0.0:
            count += 1
    return count


def rand_dataset(rng: np.random.Generator, m: int, n: int, classes: int = 2) -> Dataset:
    """Random Gaussian dataset with every class id guaranteed present."""
    X = rng.normal(size=(m, n))
    y = rng.integers(0, classes, size=m)
    y[:classes] = np.arange(classes)
    return Dataset(X, y, tuple(f"c{c}" for c in range(classes)))


def two_blobs(rng: np.random.Generator, m_per: int = 25, sep: float = 6.0, n: int = 2) -> Dataset:
    """Two well-separated Gaussian clusters, one class each."""
    lo = rng.normal(size=(m_per, n))
    hi = rng.normal(size=(m_per, n)) + sep
    X = np.vstack([lo, hi])
    y = np.repeat([0, 1], m_per)
    return Dataset(X, y, ("neg", "pos"))


def three_blobs(rng: np.random.Generator, m_per: int = 30, sep: float = 8.0) -> Dataset:
    """Three well-separated 2-D Gaussian clusters."""
    centers = np.array([[0.0, 0.0], [sep, 0.0], [0.0, sep]])
    parts = [rng.normal(size=(m_per, 2)) + c for c in centers]
    X = np.vstack(parts)
    y = np.repeat([0, 1, 2], m_per)
    return Dataset(X, y, ("a", "b", "c"))


def write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
