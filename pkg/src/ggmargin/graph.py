"""Gabriel graph construction, incremental recomputation, and support extraction.

Two samples are adjacent when no third sample lies strictly inside the
diametral sphere of the pair, i.e. the hypersphere whose diameter is the
segment joining them.  A sample inside that sphere is a *witness* against the
edge; storing per-pair witness counts makes the graph cheap to recompute
after samples are filtered out, because only witnesses belonging to the
removed set have to be re-examined.

All geometric tests use squared Euclidean distances.  The blocking test is
strict (``d(j,k)^2 > d(j,i)^2 + d(k,i)^2``), so samples exactly on the sphere
boundary do not block an edge; with continuous features such exact ties have
measure zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError
from .numeric import pairwise_sq_dists

__all__ = [
    "GabrielGraph",
    "SupportEdge",
    "SupportStructure",
    "is_gabriel_edge",
    "build_graph",
    "build_graph_with_witness",
    "recompute_after_removal",
    "extract_support",
    "edge_list",
    "to_dot",
]


@dataclass(frozen=True)
class GabrielGraph:
    """Adjacency (and optionally witness counts) over a dataset.

    ``adjacency`` is symmetric boolean with a zero diagonal.
    ``witness_counts``, when present, is strictly upper-triangular;
    ``witness_counts[j, k]`` for j < k counts the samples strictly inside the
    diametral sphere of pair (j, k), and a pair is an edge exactly when its
    count is zero.  ``sample_ids`` maps graph indices to the indices the
    samples had in the original (unfiltered) dataset.
    """

    adjacency: np.ndarray
    witness_counts: np.ndarray | None
    sample_ids: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=bool)
        ids = np.asarray(self.sample_ids, dtype=np.intp)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DataError(f"adjacency must be square, got {adj.shape}")
        if ids.shape != (adj.shape[0],):
            raise DataError("sample_ids length must match adjacency size")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "sample_ids", ids)
        if self.witness_counts is not None:
            W = np.asarray(self.witness_counts, dtype=np.int64)
            if W.shape != adj.shape:
                raise DataError("witness_counts shape must match adjacency")
            object.__setattr__(self, "witness_counts", W)

    @property
    def m(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def _check_pair(m: int, j: int, k: int) -> None:
    if not (0 <= j < m and 0 <= k < m):
        raise DataError(f"sample index out of range: ({j}, {k}) with m={m}")
    if j == k:
        raise DataError(f"a pair needs two distinct samples, got index {j} twice")


def is_gabriel_edge(dataset: Dataset, j: int, k: int) -> bool:
    """Direct evaluation of the diametral-sphere test for one pair.

    True iff no other sample lies strictly inside the sphere of (j, k).
    This is the brute-force definition and serves as the oracle for the
    batched builders.
    """
    _check_pair(dataset.m, j, k)
    X = dataset.X
    d_jk = float(((X[j] - X[k]) ** 2).sum())
    d_j = ((X - X[j]) ** 2).sum(axis=1)
    d_k = ((X - X[k]) ** 2).sum(axis=1)
    inside = d_jk > d_j + d_k
    inside[j] = False
    inside[k] = False
    return not bool(inside.any())


def _witness_matrix(X: np.ndarray) -> np.ndarray:
    """Strictly upper-triangular witness counts for all pairs.

    For pair (j, k), counts every sample i with
    ``d(j,k)^2 > d(j,i)^2 + d(k,i)^2``.  The endpoints themselves never
    satisfy the strict inequality, so they need no special casing.
    """
    m = X.shape[0]
    d2 = pairwise_sq_dists(X)
    W = np.zeros((m, m), dtype=np.int64)
    for j in range(m - 1):
        # candidates[t, i] = d2[j, i] + d2[j+1+t, i]; compare against d2[j, k]
        candidates = d2[j][None, :] + d2[j + 1 :, :]
        W[j, j + 1 :] = (d2[j, j + 1 :][:, None] > candidates).sum(axis=1)
    return W


def _adjacency_from_upper(W: np.ndarray) -> np.ndarray:
    full = W + W.T
    adj = full == 0
    np.fill_diagonal(adj, False)
    return adj


def build_graph(dataset: Dataset) -> GabrielGraph:
    """Gabriel graph of a dataset, adjacency only."""
    if dataset.m < 2:
        raise DataError(f"graph construction needs m >= 2, got m={dataset.m}")
    W = _witness_matrix(dataset.X)
    return GabrielGraph(_adjacency_from_upper(W), None, np.arange(dataset.m))


def build_graph_with_witness(dataset: Dataset) -> GabrielGraph:
    """Gabriel graph with per-pair witness counts.

    Unlike :func:`build_graph`, the inner scan never stops at the first
    witness, so the counts are complete and the graph can later be handed to
    :func:`recompute_after_removal`.
    """
    if dataset.m < 2:
        raise DataError(f"graph construction needs m >= 2, got m={dataset.m}")
    W = _witness_matrix(dataset.X)
    return GabrielGraph(_adjacency_from_upper(W), W, np.arange(dataset.m))


def recompute_after_removal(
    graph: GabrielGraph, dataset: Dataset, removed
) -> GabrielGraph:
    """Gabriel graph of the surviving samples, from stored witness counts.

    For each surviving pair, the removed samples lying strictly inside the
    pair's sphere are counted; the pair is an edge in the new graph exactly
    when every one of its witnesses was removed.  Pairs whose witness count
    was already zero therefore stay edges for any removal set, including the
    empty one.  The new graph carries updated witness counts (original count
    minus removed witnesses), so filtering can be applied repeatedly, and its
    ``sample_ids`` map the new indices back to the original dataset.

    Cost is O(r * (m-r)^2) against O((m-r)^3) for a fresh build; the output
    adjacency is identical to a fresh build on the survivors because both
    paths evaluate the same strict comparisons on the same distances.
    """
    if graph.witness_counts is None:
        raise DataError("recompute_after_removal needs a graph built with witness counts")
    if graph.m != dataset.m:
        raise DataError("graph and dataset are not index-aligned")
    removed = np.asarray(sorted(set(int(i) for i in np.asarray(removed, dtype=np.intp).ravel())), dtype=np.intp)
    if removed.size and (removed[0] < 0 or removed[-1] >= dataset.m):
        raise DataError(f"removed index out of range: {removed.min()}..{removed.max()} with m={dataset.m}")
    survivors = np.setdiff1d(np.arange(dataset.m), removed)
    if survivors.size < 2:
        raise DataError("at least two samples must survive the removal")

    W_sub = graph.witness_counts[np.ix_(survivors, survivors)]
    if removed.size == 0:
        return GabrielGraph(_adjacency_from_upper(W_sub), W_sub, graph.sample_ids[survivors])

    X = dataset.X
    d2_sr = pairwise_sq_dists(X[survivors], X[removed])
    d2_ss = pairwise_sq_dists(X[survivors])
    ms = survivors.size
    removed_inside = np.zeros((ms, ms), dtype=np.int64)
    for a in range(ms - 1):
        bound = d2_sr[a][None, :] + d2_sr[a + 1 :, :]
        removed_inside[a, a + 1 :] = (d2_ss[a, a + 1 :][:, None] > bound).sum(axis=1)

    W_new = W_sub - removed_inside
    if W_new.min() < 0:
        raise DataError("witness bookkeeping went negative; graph and dataset are inconsistent")
    return GabrielGraph(_adjacency_from_upper(W_new), W_new, graph.sample_ids[survivors])


@dataclass(frozen=True)
class SupportEdge:
    """A graph edge whose endpoints carry different class labels.

    ``j``/``k`` index the dataset the graph was extracted from (j < k);
    ``orig_j``/``orig_k`` are the corresponding indices in the original
    unfiltered dataset, kept for reporting and deterministic tie-breaking.
    """

    j: int
    k: int
    orig_j: int
    orig_k: int
    class_j: int
    class_k: int
    x_j: np.ndarray
    x_k: np.ndarray
    midpoint: np.ndarray


@dataclass(frozen=True)
class SupportStructure:
    """Support edges plus their deduplicated endpoints.

    The endpoints of cross-class edges are the structural support vectors;
    ``ssv_indices`` lists them in ascending dataset order, with
    ``ssv_centers`` and ``ssv_classes`` aligned.  ``empty`` signals that the
    graph has no cross-class edge (single-class data); callers that need a
    decision boundary must check it.
    """

    edges: tuple
    ssv_indices: np.ndarray
    ssv_centers: np.ndarray
    ssv_classes: np.ndarray

    @property
    def empty(self) -> bool:
        return len(self.edges) == 0

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_ssvs(self) -> int:
        return int(self.ssv_indices.size)


def extract_support(graph: GabrielGraph, dataset: Dataset) -> SupportStructure:
    """Cross-class edges and their endpoints.

    Returns an empty structure (``empty == True``) when no edge joins two
    classes; that can only happen when the dataset holds a single class,
    since the graph is connected.
    """
    if graph.m != dataset.m:
        raise DataError("graph and dataset are not index-aligned")
    ju, ku = np.nonzero(np.triu(graph.adjacency, 1))
    cross = dataset.y[ju] != dataset.y[ku]
    ju, ku = ju[cross], ku[cross]
    edges = tuple(
        SupportEdge(
            j=int(j),
            k=int(k),
            orig_j=int(graph.sample_ids[j]),
            orig_k=int(graph.sample_ids[k]),
            class_j=int(dataset.y[j]),
            class_k=int(dataset.y[k]),
            x_j=dataset.X[j].copy(),
            x_k=dataset.X[k].copy(),
            midpoint=(dataset.X[j] + dataset.X[k]) / 2.0,
        )
        for j, k in zip(ju, ku)
    )
    ssv_idx = np.unique(np.concatenate([ju, ku])) if edges else np.empty(0, dtype=np.intp)
    return SupportStructure(
        edges=edges,
        ssv_indices=ssv_idx.astype(np.intp),
        ssv_centers=dataset.X[ssv_idx] if edges else np.empty((0, dataset.n)),
        ssv_classes=dataset.y[ssv_idx] if edges else np.empty(0, dtype=np.intp),
    )


def edge_list(graph: GabrielGraph) -> np.ndarray:
    """Edges as an (E, 2) array of graph-local index pairs, j < k, sorted."""
    ju, ku = np.nonzero(np.triu(graph.adjacency, 1))
    return np.column_stack([ju, ku])


def to_dot(graph: GabrielGraph, dataset: Dataset, support: SupportStructure | None = None) -> str:
    """Graph as DOT text.

    Node ids are the original sample indices, each annotated with its class
    label; every edge carries ``support=true|false`` depending on whether its
    endpoints' classes differ.
    """
    if support is None:
        support = extract_support(graph, dataset)
    support_pairs = {(e.j, e.k) for e in support.edges}
    lines = ["graph gabriel {"]
    for i in range(graph.m):
        label = dataset.class_labels[dataset.y[i]]
        lines.append(f'  {int(graph.sample_ids[i])} [class="{label}"];')
    for j, k in edge_list(graph):
        flag = "true" if (int(j), int(k)) in support_pairs else "false"
        lines.append(
            f"  {int(graph.sample_ids[j])} -- {int(graph.sample_ids[k])} [support={flag}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
