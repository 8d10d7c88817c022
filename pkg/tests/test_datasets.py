"""Data cloud construction, CSV round-trips, toy generators and splits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projdepth.datasets import (
    DataCloud,
    TOY_KINDS,
    generate_toy,
    load_csv,
    save_csv,
    stratified_kfold,
    stratified_split,
)
from projdepth.errors import DataError


class TestDataCloud:
    def test_basic_shape(self):
        cloud = DataCloud(np.arange(6.0).reshape(3, 2), [0, 0, 1])
        assert cloud.n_samples == 3
        assert cloud.n_dims == 2
        assert cloud.labels.tolist() == [0, 0, 1]

    def test_rejects_nan(self):
        with pytest.raises(DataError, match="NaN or infinite"):
            DataCloud(np.array([[1.0, np.nan]]))

    def test_rejects_bad_labels(self):
        with pytest.raises(DataError, match="0 .* or 1"):
            DataCloud(np.ones((2, 2)), [0, 2])
        with pytest.raises(DataError, match="length"):
            DataCloud(np.ones((2, 2)), [0])

    def test_rejects_empty(self):
        with pytest.raises(DataError):
            DataCloud(np.empty((0, 2)))

    def test_arrays_frozen(self):
        cloud = DataCloud(np.ones((2, 2)))
        with pytest.raises(ValueError):
            cloud.features[0, 0] = 5.0

    def test_take_keeps_labels(self):
        cloud = DataCloud(np.arange(8.0).reshape(4, 2), [0, 1, 0, 1])
        sub = cloud.take([1, 3])
        assert sub.labels.tolist() == [1, 1]
        assert sub.features[0, 0] == 2.0


class TestLoadCsv:
    def test_three_row_example(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("f0,f1,label\n0,0,0\n1,1,0\n5,5,1\n")
        cloud = load_csv(path, "label")
        assert cloud.n_samples == 3
        assert cloud.n_dims == 2
        assert cloud.labels.tolist() == [0, 0, 1]
        assert cloud.features[2].tolist() == [5.0, 5.0]

    def test_no_label_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("f0,f1\n1,2\n3,4\n")
        cloud = load_csv(path)
        assert cloud.labels is None
        assert cloud.n_dims == 2

    def test_bad_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1\n1,2\n1,abc\n")
        with pytest.raises(DataError, match=r"line 3, column 'f1'.*'abc'"):
            load_csv(path)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("f0,f1\n1,2\n1,2,3\n")
        with pytest.raises(DataError, match="line 3 has 3 cells, expected 2"):
            load_csv(path)

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "bad_label.csv"
        path.write_text("f0,label\n1,0\n2,7\n")
        with pytest.raises(DataError, match="label '7' is not 0 or 1"):
            load_csv(path, "label")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_missing_label_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("f0,f1\n1,2\n")
        with pytest.raises(DataError, match="no column named 'label'"):
            load_csv(path, "label")

    def test_non_finite_cell(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("f0\n1\ninf\n")
        with pytest.raises(DataError, match="non-finite"):
            load_csv(path)


class TestSaveCsv:
    def test_round_trip_toy(self, tmp_path):
        cloud = generate_toy("unimodal", seed=7)
        path = tmp_path / "cloud.csv"
        save_csv(cloud, path)
        loaded = load_csv(path, "label")
        np.testing.assert_array_equal(loaded.features, cloud.features)
        np.testing.assert_array_equal(loaded.labels, cloud.labels)

    def test_unlabeled_cloud_has_no_label_column(self, tmp_path):
        cloud = DataCloud(np.array([[1.5, 2.5]]))
        path = tmp_path / "cloud.csv"
        save_csv(cloud, path)
        assert path.read_text().splitlines()[0] == "f0,f1"
        assert load_csv(path).labels is None

    def test_unwritable_path(self, tmp_path):
        cloud = DataCloud(np.ones((1, 1)))
        with pytest.raises(OSError):
            save_csv(cloud, tmp_path / "missing_dir" / "cloud.csv")


class TestGenerateToy:
    @pytest.mark.parametrize("kind", TOY_KINDS)
    def test_shape_and_label_counts(self, kind):
        cloud = generate_toy(kind, seed=1)
        assert cloud.n_samples == 400
        assert cloud.n_dims == 2
        assert int((cloud.labels == 0).sum()) == 300
        assert int((cloud.labels == 1).sum()) == 100

    @pytest.mark.parametrize("kind", TOY_KINDS)
    def test_deterministic(self, kind):
        a = generate_toy(kind, seed=1)
        b = generate_toy(kind, seed=1)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_different_seeds_differ(self):
        a = generate_toy("unimodal", seed=1)
        b = generate_toy("unimodal", seed=2)
        assert not np.array_equal(a.features, b.features)

    def test_moons_outliers_inside_box(self):
        cloud = generate_toy("moons", seed=3)
        outliers = cloud.features[cloud.labels == 1]
        assert (np.abs(outliers) <= 6.0).all()

    def test_unknown_kind(self):
        with pytest.raises(DataError, match="unknown toy kind"):
            generate_toy("spiral", seed=0)

    def test_unimodal_scale(self):
        inliers = generate_toy("unimodal", seed=5).features[:300]
        assert 0.2 < inliers.std() < 0.4


class TestStratifiedSplit:
    def test_toy_counts_at_60_percent(self):
        cloud = generate_toy("unimodal", seed=1)
        plan = stratified_split(cloud, 0.6, seed=4)
        train_labels = cloud.labels[plan.train_indices]
        test_labels = cloud.labels[plan.test_indices]
        assert int((train_labels == 0).sum()) == 180
        assert int((train_labels == 1).sum()) == 60
        assert int((test_labels == 0).sum()) == 120
        assert int((test_labels == 1).sum()) == 40

    def test_deterministic(self):
        cloud = generate_toy("moons", seed=1)
        a = stratified_split(cloud, 0.6, seed=9)
        b = stratified_split(cloud, 0.6, seed=9)
        np.testing.assert_array_equal(a.train_indices, b.train_indices)
        np.testing.assert_array_equal(a.test_indices, b.test_indices)

    def test_requires_labels(self):
        cloud = DataCloud(np.ones((4, 2)))
        with pytest.raises(DataError, match="labels required"):
            stratified_split(cloud, 0.6, seed=0)

    def test_tiny_class(self):
        cloud = DataCloud(np.random.default_rng(0).normal(size=(4, 2)), [0, 0, 0, 1])
        with pytest.raises(DataError, match="need at least 2"):
            stratified_split(cloud, 0.5, seed=0)

    def test_bad_fraction(self):
        cloud = generate_toy("unimodal", seed=1)
        with pytest.raises(DataError, match="train_fraction"):
            stratified_split(cloud, 1.0, seed=0)

    @settings(deadline=None, max_examples=40)
    @given(
        n_inliers=st.integers(2, 60),
        n_outliers=st.integers(2, 40),
        fraction=st.floats(0.05, 0.95),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_partition_and_floor_counts(self, n_inliers, n_outliers, fraction, seed):
        n = n_inliers + n_outliers
        labels = np.concatenate([np.zeros(n_inliers, int), np.ones(n_outliers, int)])
        labels = np.random.default_rng(seed).permutation(labels)
        cloud = DataCloud(np.arange(n, dtype=float)[:, None], labels)
        plan = stratified_split(cloud, fraction, seed)
        combined = np.sort(np.concatenate([plan.train_indices, plan.test_indices]))
        np.testing.assert_array_equal(combined, np.arange(n))
        for value, size in [(0, n_inliers), (1, n_outliers)]:
            in_train = int((cloud.labels[plan.train_indices] == value).sum())
            assert in_train == int(np.floor(fraction * size))


class TestStratifiedKfold:
    def _train_cloud(self):
        cloud = generate_toy("unimodal", seed=1)
        plan = stratified_split(cloud, 0.6, seed=2)
        return cloud.take(plan.train_indices)

    def test_fold_class_counts(self):
        train = self._train_cloud()  # 180 inliers, 60 outliers
        for plan in stratified_kfold(train, 5, seed=3):
            fold_labels = train.labels[plan.test_indices]
            assert int((fold_labels == 0).sum()) == 36
            assert int((fold_labels == 1).sum()) == 12

    def test_validation_folds_partition_everything(self):
        train = self._train_cloud()
        plans = stratified_kfold(train, 5, seed=3)
        union = np.sort(np.concatenate([p.test_indices for p in plans]))
        np.testing.assert_array_equal(union, np.arange(train.n_samples))
        for plan in plans:
            assert np.intersect1d(plan.train_indices, plan.test_indices).size == 0

    def test_class_smaller_than_k(self):
        cloud = DataCloud(np.random.default_rng(0).normal(size=(10, 2)), [0] * 7 + [1] * 3)
        with pytest.raises(DataError, match="fewer than k"):
            stratified_kfold(cloud, 5, seed=0)

    def test_deterministic(self):
        train = self._train_cloud()
        a = stratified_kfold(train, 5, seed=3)
        b = stratified_kfold(train, 5, seed=3)
        for pa, pb in zip(a, b):
            np.testing.assert_array_equal(pa.test_indices, pb.test_indices)


@settings(deadline=None, max_examples=30)
@given(
    n=st.integers(1, 12),
    d=st.integers(1, 4),
    labeled=st.booleans(),
    seed=st.integers(0, 2**32 - 1),
)
def test_csv_round_trip_random_clouds(tmp_path_factory, n, d, labeled, seed):
    rng = np.random.default_rng(seed)
    features = rng.normal(scale=10.0 ** rng.integers(-8, 8), size=(n, d))
    labels = rng.integers(0, 2, n) if labeled else None
    cloud = DataCloud(features, labels)
    path = tmp_path_factory.mktemp("roundtrip") / "cloud.csv"
    save_csv(cloud, path)
    loaded = load_csv(path, "label" if labeled else None)
    np.testing.assert_array_equal(loaded.features, cloud.features)
    if labeled:
        np.testing.assert_array_equal(loaded.labels, cloud.labels)
    else:
        assert loaded.labels is None
