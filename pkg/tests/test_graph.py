from __future__ import annotations

import numpy as np
import pytest
from scipy.sparse.csgraph import connected_components

from conftest import brute_force_adjacency, brute_force_witnesses, rand_dataset, two_blobs
from ggmargin import (
    DataError,
    Dataset,
    DuplicateSampleError,
    build_graph,
    build_graph_with_witness,
    edge_list,
    extract_support,
    is_gabriel_edge,
    recompute_after_removal,
    to_dot,
)


def _ds(points, labels=None):
    pts = np.asarray(points, dtype=np.float64)
    if labels is None:
        labels = [0] * (len(pts) - 1) + [1]
    return Dataset(pts, np.asarray(labels), ("a", "b"))


class TestIsGabrielEdge:

    def test_two_points_always_adjacent(self):
        ds = _ds([[0.0, 0.0], [3.0, 1.0]], [0, 1])
        assert is_gabriel_edge(ds, 0, 1)
        assert is_gabriel_edge(ds, 1, 0)

    def test_collinear_middle_blocks_outer_pair(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0, 0, 1])
        assert not is_gabriel_edge(ds, 0, 2)
        assert is_gabriel_edge(ds, 0, 1)
        assert is_gabriel_edge(ds, 1, 2)

    def test_boundary_contact_does_not_block(self):
        """A right angle puts the third point exactly on the sphere."""
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [0, 0, 1])
        assert is_gabriel_edge(ds, 1, 2)

    def test_unit_square_keeps_its_diagonals(self):
        # Each diagonal's sphere passes exactly through the two other
        # corners, and boundary contact does not block.
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], [0, 0, 1, 1])
        for j in range(4):
            for k in range(j + 1, 4):
                assert is_gabriel_edge(ds, j, k)

    def test_square_with_center_drops_diagonals(self):
        pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]
        ds = _ds(pts, [0, 0, 1, 1, 0])
        assert not is_gabriel_edge(ds, 0, 2)
        assert not is_gabriel_edge(ds, 1, 3)
        # sides survive: the center sits exactly on their spheres
        for j, k in [(0, 1), (1, 2), (2, 3), (0, 3)]:
            assert is_gabriel_edge(ds, j, k)
        # the center connects to every corner
        for k in range(4):
            assert is_gabriel_edge(ds, 4, k)

    def test_rejects_equal_indices(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0]], [0, 1])
        with pytest.raises(DataError):
            is_gabriel_edge(ds, 1, 1)

    def test_rejects_out_of_range_index(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0]], [0, 1])
        with pytest.raises(DataError):
            is_gabriel_edge(ds, 0, 2)

    def test_matches_definition_on_random_data(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            ds = rand_dataset(rng, int(rng.integers(8, 25)), 2)
            expected = brute_force_adjacency(ds.X)
            for j in range(ds.m):
                for k in range(j + 1, ds.m):
                    assert is_gabriel_edge(ds, j, k) == expected[j, k]


class TestBuildGraph:

    def test_two_points(self):
        g = build_graph(_ds([[0.0, 0.0], [1.0, 1.0]], [0, 1]))
        assert g.adjacency.tolist() == [[False, True], [True, False]]
        assert g.witness_counts is None

    def test_collinear_chain(self):
        g = build_graph(_ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0, 0, 1]))
        assert edge_list(g).tolist() == [[0, 1], [1, 2]]

    def test_adjacency_is_symmetric_with_empty_diagonal(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            g = build_graph(rand_dataset(rng, 40, 3))
            assert np.array_equal(g.adjacency, g.adjacency.T)
            assert not g.adjacency.diagonal().any()

    def test_matches_per_pair_oracle_in_three_dimensions(self):
        rng = np.random.default_rng(13)
        X = rng.uniform(size=(50, 3))
        ds = Dataset(X, np.r_[np.zeros(25, dtype=int), np.ones(25, dtype=int)], ("a", "b"))
        g = build_graph(ds)
        assert np.array_equal(g.adjacency, brute_force_adjacency(X))

    def test_is_connected(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            g = build_graph(rand_dataset(rng, int(rng.integers(10, 80)), int(rng.integers(2, 5))))
            n_comp, _ = connected_components(g.adjacency, directed=False)
            assert n_comp == 1

    def test_rejects_single_point(self):
        with pytest.raises(DataError):
            build_graph(Dataset(np.zeros((1, 2)), np.zeros(1, dtype=int), ("a",)))

    def test_duplicate_rows_rejected_at_ingestion(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(DuplicateSampleError):
            Dataset(X, np.array([0, 1, 0]), ("a", "b"))


class TestWitnessCounts:

    def test_collinear_counts(self):
        g = build_graph_with_witness(_ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0, 0, 1]))
        assert g.witness_counts[0, 2] == 1
        assert g.witness_counts[0, 1] == 0
        assert g.witness_counts[1, 2] == 0

    def test_two_witnesses_inside_one_sphere(self):
        pts = [[0.0, 0.0], [4.0, 0.0], [1.9, 0.1], [2.1, -0.1]]
        g = build_graph_with_witness(_ds(pts, [0, 1, 0, 1]))
        assert g.witness_counts[0, 1] == 2
        assert not g.adjacency[0, 1]

    def test_adjacency_iff_zero_witnesses(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            g = build_graph_with_witness(rand_dataset(rng, 50, 3))
            W = g.witness_counts + g.witness_counts.T
            both = g.adjacency == (W == 0)
            np.fill_diagonal(both, True)
            assert both.all()

    def test_counts_are_strictly_upper_triangular(self):
        rng = np.random.default_rng(23)
        g = build_graph_with_witness(rand_dataset(rng, 30, 2))
        assert np.array_equal(np.tril(g.witness_counts), np.zeros_like(g.witness_counts))

    def test_counts_match_brute_force(self):
        rng = np.random.default_rng(29)
        ds = rand_dataset(rng, 25, 3)
        g = build_graph_with_witness(ds)
        for j in range(ds.m):
            for k in range(j + 1, ds.m):
                assert g.witness_counts[j, k] == brute_force_witnesses(ds.X, j, k)

    def test_same_adjacency_as_plain_build(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            ds = rand_dataset(rng, int(rng.integers(10, 60)), int(rng.integers(2, 5)))
            assert np.array_equal(
                build_graph(ds).adjacency, build_graph_with_witness(ds).adjacency
            )


class TestRecomputeAfterRemoval:

    def test_empty_removal_keeps_everything(self):
        rng = np.random.default_rng(37)
        ds = rand_dataset(rng, 30, 2)
        g = build_graph_with_witness(ds)
        out = recompute_after_removal(g, ds, np.array([], dtype=int))
        assert np.array_equal(out.adjacency, g.adjacency)
        assert np.array_equal(out.sample_ids, g.sample_ids)

    def test_removing_the_middle_witness_restores_the_edge(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0, 0, 1])
        g = build_graph_with_witness(ds)
        out = recompute_after_removal(g, ds, np.array([1]))
        assert out.adjacency.tolist() == [[False, True], [True, False]]
        assert out.sample_ids.tolist() == [0, 2]

    def test_matches_fresh_build(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            m = int(rng.integers(10, 80))
            ds = rand_dataset(rng, m, int(rng.integers(2, 5)))
            g = build_graph_with_witness(ds)
            r = int(rng.integers(1, m // 2 + 1))
            removed = np.sort(rng.choice(m, size=r, replace=False))
            survivors = np.setdiff1d(np.arange(m), removed)
            out = recompute_after_removal(g, ds, removed)
            fresh = build_graph_with_witness(ds.subset(survivors))
            assert np.array_equal(out.adjacency, fresh.adjacency)

    def test_witness_counts_match_fresh_build(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            ds = rand_dataset(rng, 40, 4)
            g = build_graph_with_witness(ds)
            removed = np.sort(rng.choice(40, size=12, replace=False))
            survivors = np.setdiff1d(np.arange(40), removed)
            out = recompute_after_removal(g, ds, removed)
            fresh = build_graph_with_witness(ds.subset(survivors))
            assert np.array_equal(out.witness_counts, fresh.witness_counts)

    def test_chained_removal_equals_one_shot(self):
        """The output graph carries witness counts, so filtering can chain."""
        rng = np.random.default_rng(47)
        ds = rand_dataset(rng, 50, 3)
        g = build_graph_with_witness(ds)
        first = np.array([3, 10, 31])
        survivors1 = np.setdiff1d(np.arange(50), first)
        step1 = recompute_after_removal(g, ds, first)
        ds1 = ds.subset(survivors1)
        second_local = np.array([0, 5, 20])
        step2 = recompute_after_removal(step1, ds1, second_local)
        both = np.sort(np.union1d(first, survivors1[second_local]))
        fresh = build_graph_with_witness(ds.subset(np.setdiff1d(np.arange(50), both)))
        assert np.array_equal(step2.adjacency, fresh.adjacency)
        assert np.array_equal(step2.witness_counts, fresh.witness_counts)

    def test_sample_ids_track_survivors(self):
        rng = np.random.default_rng(53)
        ds = rand_dataset(rng, 20, 2)
        g = build_graph_with_witness(ds)
        out = recompute_after_removal(g, ds, np.array([0, 7, 19]))
        assert out.sample_ids.tolist() == sorted(set(range(20)) - {0, 7, 19})

    def test_requires_witness_counts(self):
        rng = np.random.default_rng(59)
        ds = rand_dataset(rng, 15, 2)
        g = build_graph(ds)
        with pytest.raises(DataError):
            recompute_after_removal(g, ds, np.array([1]))

    def test_rejects_out_of_range_removal(self):
        rng = np.random.default_rng(61)
        ds = rand_dataset(rng, 15, 2)
        g = build_graph_with_witness(ds)
        with pytest.raises(DataError):
            recompute_after_removal(g, ds, np.array([15]))

    def test_rejects_removing_almost_everything(self):
        rng = np.random.default_rng(67)
        ds = rand_dataset(rng, 10, 2)
        g = build_graph_with_witness(ds)
        with pytest.raises(DataError):
            recompute_after_removal(g, ds, np.arange(9))


class TestSupportStructure:

    def test_two_points_two_classes(self):
        ds = _ds([[0.0, 0.0], [2.0, 4.0]], [0, 1])
        support = extract_support(build_graph(ds), ds)
        assert support.n_edges == 1
        assert support.n_ssvs == 2
        np.testing.assert_allclose(support.edges[0].midpoint, [1.0, 2.0])

    def test_two_points_same_class_gives_empty_signal(self):
        ds = Dataset(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0, 0]), ("a",))
        support = extract_support(build_graph(ds), ds)
        assert support.empty
        assert support.n_edges == 0

    def test_edges_are_exactly_the_cross_class_edges(self):
        rng = np.random.default_rng(71)
        ds = two_blobs(rng, m_per=15, sep=3.0)
        g = build_graph(ds)
        support = extract_support(g, ds)
        expected = set()
        adj = brute_force_adjacency(ds.X)
        for j in range(ds.m):
            for k in range(j + 1, ds.m):
                if adj[j, k] and ds.y[j] != ds.y[k]:
                    expected.add((j, k))
        got = {(e.j, e.k) for e in support.edges}
        assert got == expected

    def test_ssvs_are_deduplicated_edge_endpoints(self):
        rng = np.random.default_rng(73)
        ds = two_blobs(rng, m_per=20, sep=2.5)
        support = extract_support(build_graph(ds), ds)
        endpoint_ids = set()
        for e in support.edges:
            endpoint_ids.add(e.j)
            endpoint_ids.add(e.k)
        assert sorted(endpoint_ids) == sorted(support.ssv_indices.tolist())
        assert len(set(support.ssv_indices.tolist())) == support.n_ssvs

    def test_midpoints_are_coordinate_means(self):
        rng = np.random.default_rng(79)
        ds = two_blobs(rng, m_per=10, sep=4.0)
        support = extract_support(build_graph(ds), ds)
        for e in support.edges:
            np.testing.assert_allclose(e.midpoint, (ds.X[e.j] + ds.X[e.k]) / 2.0, rtol=0, atol=0)

    def test_edge_records_carry_classes(self):
        rng = np.random.default_rng(83)
        ds = two_blobs(rng, m_per=10, sep=4.0)
        support = extract_support(build_graph(ds), ds)
        for e in support.edges:
            assert e.class_j == ds.y[e.j]
            assert e.class_k == ds.y[e.k]
            assert e.class_j != e.class_k


class TestDotExport:

    def test_header_nodes_and_edges(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0, 0, 1])
        g = build_graph(ds)
        dot = to_dot(g, ds, extract_support(g, ds))
        assert dot.startswith("graph gabriel {")
        assert dot.rstrip().endswith("}")
        assert '0 [class="a"];' in dot
        assert '2 [class="b"];' in dot
        assert "0 -- 1 [support=false];" in dot
        assert "1 -- 2 [support=true];" in dot

    def test_node_ids_survive_removal(self):
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]], [0, 0, 1, 1])
        g = build_graph_with_witness(ds)
        out = recompute_after_removal(g, ds, np.array([1]))
        kept = ds.subset(np.array([0, 2, 3]))
        dot = to_dot(out, kept)
        assert '3 [class="b"];' in dot
        assert "0 -- 2" in dot
