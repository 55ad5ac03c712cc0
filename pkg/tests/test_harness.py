from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from conftest import rand_dataset, three_blobs, two_blobs, write_csv
from ggmargin import (
    BenchmarkRecord,
    DataError,
    Dataset,
    ExperimentConfig,
    SplitError,
    UsageError,
    bench_recompute,
    benchmark_csv_rows,
    fit_pipeline,
    format_report_table,
    load_csv,
    predict_proba,
    report_to_dict,
    run_nested_cv,
    standardize,
    stratified_kfold,
)


def blob_csv(tmp_path, rng=None, m_per=15, sep=6.0, name="blobs.csv"):
    rng = rng or np.random.default_rng(211)
    ds = two_blobs(rng, m_per=m_per, sep=sep)
    path = tmp_path / name
    rows = [[repr(float(x1)), repr(float(x2)), lab] for (x1, x2), lab in
            zip(ds.X, (ds.class_labels[c] for c in ds.y))]
    write_csv(path, ["f1", "f2", "class"], rows)
    return path, ds


class TestLoadCsv:

    def test_small_file(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "b", "class"], [[1.0, 2.0, "x"], [3.0, 4.0, "y"], [5.0, 6.0, "x"]])
        ds = load_csv(p, "class")
        assert ds.m == 3
        assert ds.n == 2
        assert ds.class_labels == ("x", "y")
        assert ds.y.tolist() == [0, 1, 0]

    def test_numeric_labels_sort_numerically(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "class"], [[1.0, "10"], [2.0, "2"], [3.0, "10"]])
        ds = load_csv(p, "class")
        assert ds.class_labels == ("2", "10")

    def test_missing_cell_names_line_and_column(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b,class\n1.0,,x\n", encoding="utf-8")
        with pytest.raises(DataError, match="line 2.*'b'"):
            load_csv(p, "class")

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "class"], [["eleven", "x"], [2.0, "y"]])
        with pytest.raises(DataError, match="non-numeric"):
            load_csv(p, "class")

    def test_absent_label_column(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "b"], [[1.0, 2.0]])
        with pytest.raises(DataError, match="label column"):
            load_csv(p, "class")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv", "class")

    def test_duplicate_rows_dropped_with_warning(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(
            p,
            ["a", "b", "class"],
            [[1.0, 2.0, "x"], [3.0, 4.0, "y"], [1.0, 2.0, "x"], [5.0, 6.0, "y"]],
        )
        with pytest.warns(UserWarning, match="duplicate"):
            ds = load_csv(p, "class")
        assert ds.m == 3
        np.testing.assert_allclose(ds.X[0], [1.0, 2.0])

    def test_duplicate_with_conflicting_label_keeps_first(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(
            p,
            ["a", "class"],
            [[1.0, "x"], [2.0, "y"], [1.0, "y"]],
        )
        with pytest.warns(UserWarning, match="different label"):
            ds = load_csv(p, "class")
        assert ds.m == 2
        assert ds.class_labels[ds.y[0]] == "x"

    def test_float_text_roundtrip_is_exact(self, tmp_path):
        rng = np.random.default_rng(223)
        values = rng.normal(size=5)
        p = tmp_path / "t.csv"
        rows = [[repr(float(v)), "x" if i % 2 else "y"] for i, v in enumerate(values)]
        write_csv(p, ["a", "class"], rows)
        ds = load_csv(p, "class")
        assert np.array_equal(ds.X[:, 0], values)


class TestStandardize:

    def test_train_statistics(self):
        X = np.array([[3.0, 10.0], [7.0, 30.0]])
        train = Dataset(X, np.array([0, 1]), ("a", "b"))
        out, prep = standardize(train, train)
        np.testing.assert_allclose(out.X.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.X.std(axis=0), 1.0, atol=1e-10)

    def test_hand_value(self):
        train = Dataset(np.array([[3.0], [7.0]]), np.array([0, 1]), ("a", "b"))
        other = Dataset(np.array([[7.0]]), np.array([0]), ("a", "b"))
        out, prep = standardize(train, other)
        np.testing.assert_allclose(out.X, [[1.0]])  # (7-5)/2

    def test_zero_variance_column_dropped(self):
        X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        train = Dataset(X, np.array([0, 0, 1]), ("a", "b"))
        with pytest.warns(UserWarning, match="zero-variance"):
            out, prep = standardize(train, train)
        assert out.n == 1
        assert prep.kept_columns.tolist() == [0]

    def test_all_constant_is_an_error(self):
        X = np.array([[5.0, 1.0], [5.0, 1.0]])
        with pytest.raises(Exception):
            # identical rows are already rejected at Dataset construction
            Dataset(X, np.array([0, 1]), ("a", "b"))
        X2 = np.array([[5.0], [5.0]])
        with pytest.raises(Exception):
            Dataset(X2, np.array([0, 1]), ("a", "b"))

    def test_transform_checks_raw_width(self):
        X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        train = Dataset(X, np.array([0, 0, 1]), ("a", "b"))
        with pytest.warns(UserWarning):
            _, prep = standardize(train, train)
        with pytest.raises(DataError):
            prep.transform(np.zeros((2, 1)))  # narrower than the raw layout


class TestStratifiedKfold:

    def test_balanced_two_class(self):
        rng = np.random.default_rng(227)
        ds = rand_dataset(rng, 10, 2)
        ds = Dataset(ds.X, np.arange(10) % 2, ("a", "b"))
        splits = stratified_kfold(ds, 5, seed=1)
        assert len(splits) == 5
        for train, test in splits:
            assert test.size == 2
            assert (ds.y[test] == 0).sum() == 1
            assert (ds.y[test] == 1).sum() == 1

    def test_partition(self):
        rng = np.random.default_rng(229)
        ds = rand_dataset(rng, 37, 3, classes=3)
        splits = stratified_kfold(ds, 4, seed=9)
        all_test = np.concatenate([test for _, test in splits])
        assert np.array_equal(np.sort(all_test), np.arange(37))
        for train, test in splits:
            assert np.intersect1d(train, test).size == 0
            assert np.array_equal(np.sort(np.r_[train, test]), np.arange(37))

    def test_per_class_counts_differ_by_at_most_one(self):
        rng = np.random.default_rng(233)
        ds = rand_dataset(rng, 53, 2, classes=3)
        splits = stratified_kfold(ds, 5, seed=3)
        for c in range(3):
            counts = [(ds.y[test] == c).sum() for _, test in splits]
            assert max(counts) - min(counts) <= 1

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(239)
        ds = rand_dataset(rng, 30, 2)
        a = stratified_kfold(ds, 3, seed=7)
        b = stratified_kfold(ds, 3, seed=7)
        for (ta, sa), (tb, sb) in zip(a, b):
            assert np.array_equal(ta, tb)
            assert np.array_equal(sa, sb)
        c = stratified_kfold(ds, 3, seed=8)
        assert any(not np.array_equal(sa, sc) for (_, sa), (_, sc) in zip(a, c))

    def test_small_class_is_an_error(self):
        rng = np.random.default_rng(241)
        X = rng.normal(size=(7, 2))
        y = np.array([0, 0, 0, 0, 0, 1, 1])
        ds = Dataset(X, y, ("big", "small"))
        with pytest.raises(SplitError, match="small"):
            stratified_kfold(ds, 3, seed=0)


class TestExperimentConfig:

    def test_defaults_validate(self):
        cfg = ExperimentConfig(dataset="x.csv")
        cfg.validate()
        assert cfg.outer_folds == 5
        assert cfg.inner_folds == 5

    def test_dict_roundtrip(self):
        cfg = ExperimentConfig(dataset="x.csv", architecture="chipclass-tanh", sigma_grid=7, seed=42)
        clone = ExperimentConfig.from_dict(cfg.to_dict())
        assert clone == cfg

    def test_unknown_key_is_a_usage_error(self):
        with pytest.raises(UsageError):
            ExperimentConfig.from_dict({"dataset": "x.csv", "bandwith": 2.0})

    def test_json_file_roundtrip(self, tmp_path):
        cfg = ExperimentConfig(dataset="x.csv", seed=3, filter_policy="count")
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg.to_dict()), encoding="utf-8")
        assert ExperimentConfig.from_json_file(p) == cfg

    def test_sigma_grid_is_geometric(self):
        cfg = ExperimentConfig(dataset="x.csv", sigma_low=0.1, sigma_high=10.0, sigma_grid=5)
        sig = cfg.sigma_candidates()
        np.testing.assert_allclose(sig, np.geomspace(0.1, 10.0, 5))

    def test_sigma_draws_are_seeded_and_bounded(self):
        cfg = ExperimentConfig(dataset="x.csv", sigma_draws=8, seed=11)
        a = cfg.sigma_candidates()
        b = cfg.sigma_candidates()
        assert a == b
        assert all(0.1 <= s <= 10.0 for s in a)
        assert len(a) == 8

    def test_cardinality_membership_has_no_sigma_axis(self):
        cfg = ExperimentConfig(dataset="x.csv", membership="cardinality")
        assert cfg.candidates() == [(None, None)]

    def test_count_policy_expands_the_grid(self):
        cfg = ExperimentConfig(
            dataset="x.csv", membership="cardinality", filter_policy="count", count_grid=(0, 2)
        )
        assert cfg.candidates() == [(None, 0), (None, 2)]

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv("GGM_SEED", "123")
        cfg = ExperimentConfig(dataset="x.csv")
        assert cfg.resolved_seed == 123
        cfg2 = ExperimentConfig(dataset="x.csv", seed=5)
        assert cfg2.resolved_seed == 5
        monkeypatch.delenv("GGM_SEED")
        assert cfg.resolved_seed == 0

    def test_validation_rejects_bad_bounds(self):
        with pytest.raises(UsageError):
            ExperimentConfig(dataset="x.csv", sigma_low=2.0, sigma_high=1.0).validate()
        with pytest.raises(UsageError):
            ExperimentConfig(dataset="x.csv", outer_folds=1).validate()
        with pytest.raises(UsageError):
            ExperimentConfig(dataset="x.csv", architecture="svm").validate()


class TestFitPipeline:

    def test_all_architectures_run(self):
        rng = np.random.default_rng(251)
        ds2 = two_blobs(rng, m_per=15, sep=6.0)
        ds3 = three_blobs(rng, m_per=12, sep=8.0)
        for arch, ds in [
            ("chipclass-exp", ds2),
            ("chipclass-tanh", ds2),
            ("ssv-binary", ds2),
            ("ssv-multiclass", ds3),
        ]:
            res = fit_pipeline(ds, arch, membership="distance", sigma=1.0)
            assert res.model.architecture == arch
            assert res.n_ssv >= 2
            assert res.n_edges >= 1
            P = predict_proba(res.model, ds.X)
            assert P.shape == (ds.m, ds.class_count)

    def test_count_policy_with_cap(self):
        rng = np.random.default_rng(257)
        ds = two_blobs(rng, m_per=15, sep=6.0)
        res = fit_pipeline(
            ds, "ssv-binary", membership="cardinality", sigma=None,
            filter_policy="count", count_r=100,
        )
        # the request is capped at 20% of each class
        assert res.n_removed == 2 * int(0.2 * 15)

    def test_unknown_architecture_is_usage_error(self):
        rng = np.random.default_rng(263)
        ds = two_blobs(rng, m_per=10)
        with pytest.raises(UsageError):
            fit_pipeline(ds, "forest")

    def test_distance_membership_needs_sigma(self):
        rng = np.random.default_rng(269)
        ds = two_blobs(rng, m_per=10)
        with pytest.raises(UsageError):
            fit_pipeline(ds, "ssv-binary", membership="distance", sigma=None)


class TestRunNestedCv:

    def _config(self, **kw):
        base = dict(
            dataset="", architecture="ssv-binary", membership="distance",
            sigma_grid=3, outer_folds=3, inner_folds=2, seed=5,
        )
        base.update(kw)
        return ExperimentConfig(**base)

    def test_separable_blobs_reach_high_auc(self):
        rng = np.random.default_rng(271)
        ds = two_blobs(rng, m_per=30, sep=7.0)
        report = run_nested_cv(self._config(), dataset=ds)
        assert report.mean >= 0.99
        assert len(report.fold_values) == 3

    def test_deterministic_repeat(self):
        rng = np.random.default_rng(277)
        ds = two_blobs(rng, m_per=20, sep=5.0)
        a = run_nested_cv(self._config(), dataset=ds)
        b = run_nested_cv(self._config(), dataset=ds)
        assert a == b

    def test_parallel_equals_serial(self):
        rng = np.random.default_rng(281)
        ds = two_blobs(rng, m_per=20, sep=5.0)
        serial = run_nested_cv(self._config(jobs=1), dataset=ds)
        parallel = run_nested_cv(self._config(jobs=4), dataset=ds)
        assert serial.fold_values == parallel.fold_values
        assert serial.details == parallel.details

    def test_details_carry_the_chosen_candidate(self):
        rng = np.random.default_rng(283)
        ds = two_blobs(rng, m_per=20, sep=5.0)
        report = run_nested_cv(self._config(), dataset=ds)
        for f, d in enumerate(report.details):
            assert d["fold"] == f
            assert 0.0 <= d["metric"] <= 1.0
            assert d["sigma"] is None or 0.1 <= d["sigma"] <= 10.0
            assert d["n_ssv"] >= 2
            assert "metric_alt_orientation" in d
        assert report.extras["positive_label"] == "pos"

    def test_multiclass_metric_is_ovo(self):
        rng = np.random.default_rng(293)
        ds = three_blobs(rng, m_per=18, sep=8.0)
        report = run_nested_cv(
            self._config(architecture="ssv-multiclass", membership="cardinality"),
            dataset=ds,
        )
        assert report.metric_name == "roc_auc_ovo"
        assert report.mean >= 0.99

    def test_binary_architecture_rejects_three_classes(self):
        rng = np.random.default_rng(307)
        ds = three_blobs(rng, m_per=10)
        with pytest.raises(DataError):
            run_nested_cv(self._config(), dataset=ds)

    def test_report_dict_is_json_stable(self):
        rng = np.random.default_rng(311)
        ds = two_blobs(rng, m_per=20, sep=5.0)
        cfg = self._config()
        a = json.dumps(report_to_dict(run_nested_cv(cfg, dataset=ds), cfg), sort_keys=True)
        b = json.dumps(report_to_dict(run_nested_cv(cfg, dataset=ds), cfg), sort_keys=True)
        assert a == b
        payload = json.loads(a)
        assert set(payload) == {"metric", "per_fold", "mean", "std", "extras", "config"}

    def test_table_lists_every_fold(self):
        rng = np.random.default_rng(313)
        ds = two_blobs(rng, m_per=20, sep=5.0)
        report = run_nested_cv(self._config(), dataset=ds)
        table = format_report_table(report)
        for d in report.details:
            assert f"{d['fold']}" in table
        assert "mean" in table


class TestBenchmark:

    def test_records_and_rows(self):
        rng = np.random.default_rng(331)
        ds = rand_dataset(rng, 120, 3)
        records = bench_recompute(ds, [0.2, 0.4], repetitions=3, seed=1, dataset_id="t")
        assert len(records) == 2
        for rec in records:
            assert rec.repetitions == 3
            assert rec.mean_fresh > 0
            assert rec.mean_incremental > 0
        rows = benchmark_csv_rows(records)
        assert len(rows) == 2 * 3 * 2
        assert set(rows[0]) == {"dataset", "m", "fraction", "rep", "method", "seconds"}
        assert {r["method"] for r in rows} == {"fresh", "incremental"}

    def test_fraction_bounds(self):
        rng = np.random.default_rng(337)
        ds = rand_dataset(rng, 30, 2)
        with pytest.raises(DataError):
            bench_recompute(ds, [0.0], repetitions=3)
        with pytest.raises(DataError):
            bench_recompute(ds, [1.0], repetitions=3)

    def test_minimum_repetitions(self):
        rng = np.random.default_rng(347)
        ds = rand_dataset(rng, 30, 2)
        with pytest.raises(DataError):
            bench_recompute(ds, [0.2], repetitions=2)
        with pytest.raises(DataError):
            BenchmarkRecord.from_times("d", 30, 0.2, [0.1, 0.1], [0.1, 0.1])
