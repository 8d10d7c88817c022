"""Kernel PCA: eigenpairs, out-of-sample projection, reconstruction scores,
and the JSON model file."""

import json

import numpy as np
import pytest

from projdepth.datasets import DataCloud
from projdepth.errors import DataError, NumericalError
from projdepth.kernels import KernelSpec, centered_gram, fit_gram, kernel_eval
from projdepth.kpca import (
    EffectiveRankWarning,
    fit_kpca,
    load_kpca_model,
    reconstruction_error_score,
    save_kpca_model,
    transform,
)


def random_cloud(n, d, seed):
    return DataCloud(np.random.default_rng(seed).normal(size=(n, d)))


def fit(n, d, seed, gamma=0.5, m=None, family="rbf"):
    cloud = random_cloud(n, d, seed)
    model = fit_gram(KernelSpec(family, gamma), cloud)
    return fit_kpca(model, m if m is not None else n - 1)


def pca_scores(features):
    """Covariance-matrix PCA oracle: scores of the mean-centered cloud."""
    centered = features - features.mean(axis=0)
    eigenvalues, eigenvectors = np.linalg.eigh(centered.T @ centered)
    order = np.argsort(eigenvalues)[::-1]
    return centered @ eigenvectors[:, order]


class TestFitKpca:
    def test_identical_points_have_no_spectrum(self):
        model = fit_gram(KernelSpec("rbf", 1.0), DataCloud(np.ones((2, 2))))
        with pytest.raises(NumericalError, match="no usable spectrum"):
            fit_kpca(model, 1)

    def test_m_out_of_range(self):
        gram = fit_gram(KernelSpec(), random_cloud(5, 2, seed=0))
        with pytest.raises(DataError, match=r"\[1, 4\]"):
            fit_kpca(gram, 5)
        with pytest.raises(DataError):
            fit_kpca(gram, 0)

    def test_linear_kernel_matches_covariance_pca(self):
        cloud = random_cloud(40, 3, seed=1)
        model = fit_kpca(fit_gram(KernelSpec("linear", 1.0), cloud), 3)
        expected = pca_scores(cloud.features)[:, : model.n_components]
        for j in range(model.n_components):
            a, b = model.train_embedding[:, j], expected[:, j]
            assert min(np.abs(a - b).max(), np.abs(a + b).max()) <= 1e-8

    def test_column_variances_equal_eigenvalue_over_n(self):
        model = fit(30, 4, seed=2, m=10)
        variances = model.train_embedding.var(axis=0)
        np.testing.assert_allclose(variances, model.eigenvalues / 30, atol=1e-8)

    def test_columns_are_centered(self):
        model = fit(25, 3, seed=3, m=8)
        assert np.abs(model.train_embedding.mean(axis=0)).max() <= 1e-8

    def test_feature_space_unit_norm(self):
        model = fit(20, 2, seed=4, m=6)
        norms = model.eigenvalues * np.einsum("ij,ij->j", model.coefficients, model.coefficients)
        np.testing.assert_allclose(norms, 1.0, atol=1e-8)

    def test_eigen_residuals(self):
        for seed, n in [(5, 12), (6, 37), (7, 100)]:
            cloud = random_cloud(n, 3, seed=seed)
            gram = fit_gram(KernelSpec("rbf", 0.4), cloud)
            model = fit_kpca(gram, n - 1)
            centered = centered_gram(gram)
            bound = 1e-8 * np.abs(centered).sum(axis=1).max()
            unit_vectors = model.coefficients * np.sqrt(model.eigenvalues)
            residual = centered @ unit_vectors - unit_vectors * model.eigenvalues
            assert np.abs(residual).max() <= bound

    def test_eigenvalues_descend(self):
        model = fit(30, 3, seed=8, m=12)
        assert (np.diff(model.eigenvalues) < 0).all()
        assert (model.eigenvalues > 0).all()

    def test_sign_convention(self):
        model = fit(15, 2, seed=9, m=5)
        for j in range(model.n_components):
            column = model.coefficients[:, j]
            assert column[np.abs(column).argmax()] > 0

    def test_rank_capping_warns(self):
        # tiny gamma makes the RBF Gram nearly rank-deficient
        cloud = random_cloud(20, 2, seed=10)
        gram = fit_gram(KernelSpec("rbf", 1e-9), cloud)
        with pytest.warns(EffectiveRankWarning):
            model = fit_kpca(gram, 19)
        assert model.n_components < 19

    def test_deterministic_refit(self):
        a = fit(18, 3, seed=11, m=6)
        b = fit(18, 3, seed=11, m=6)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)
        np.testing.assert_array_equal(a.train_embedding, b.train_embedding)

    def test_linear_kernel_full_rank_preserves_distances(self):
        cloud = random_cloud(20, 3, seed=12)
        model = fit_kpca(fit_gram(KernelSpec("linear", 1.0), cloud), 3)
        centered = cloud.features - cloud.features.mean(axis=0)
        for i in range(0, 20, 5):
            for j in range(20):
                original = np.linalg.norm(centered[i] - centered[j])
                embedded = np.linalg.norm(model.train_embedding[i] - model.train_embedding[j])
                assert abs(original - embedded) <= 1e-8


class TestTransform:
    def test_training_queries_reproduce_embedding(self):
        model = fit(22, 3, seed=13, m=7)
        out = transform(model, model.gram_model.training_cloud.features)
        np.testing.assert_array_equal(out, model.train_embedding)

    def test_far_query_is_finite(self):
        model = fit(15, 2, seed=14, m=5)
        beta = transform(model, np.array([[1e3, -1e3]]))
        assert np.isfinite(beta).all()

    def test_matches_hand_rolled_product(self):
        # oracle: explicit loops over the centered cross row and coefficients
        cloud = random_cloud(5, 2, seed=15)
        spec = KernelSpec("rbf", 0.6)
        model = fit_kpca(fit_gram(spec, cloud), 2)
        query = np.array([0.4, 0.9])
        cross = np.array([kernel_eval(spec, query, x) for x in cloud.features])
        gram = model.gram_model.gram
        centered_row = cross - cross.mean() - gram.mean(axis=0) + gram.mean()
        expected = np.array(
            [float(np.dot(centered_row, model.coefficients[:, j])) for j in range(2)]
        )
        got = transform(model, query[None, :])[0]
        np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_dimension_mismatch(self):
        model = fit(10, 3, seed=16, m=3)
        with pytest.raises(DataError, match="expected 3"):
            transform(model, np.ones((2, 2)))


class TestReconstructionErrorScore:
    def test_full_rank_reconstructs_training_points(self):
        model = fit(25, 3, seed=17)
        scores = reconstruction_error_score(model, model.gram_model.training_cloud.features)
        assert scores.max() <= 1e-6

    def test_scores_non_negative(self):
        model = fit(20, 2, seed=18, m=4)
        queries = np.random.default_rng(19).normal(size=(50, 2))
        assert (reconstruction_error_score(model, queries) >= 0).all()

    def test_matches_full_eigenbasis_oracle(self):
        # oracle: expand ||phi~(q) - proj_M phi~(q)||^2 with explicit inner
        # products through the kernel, using raw alpha vectors
        cloud = random_cloud(6, 2, seed=20)
        spec = KernelSpec("rbf", 0.8)
        gram_model = fit_gram(spec, cloud)
        model = fit_kpca(gram_model, 2)
        centered = centered_gram(gram_model)
        rng = np.random.default_rng(21)
        queries = rng.normal(size=(10, 2))
        got = reconstruction_error_score(model, queries)
        for q, score in zip(queries, got):
            cross = np.array([kernel_eval(spec, q, x) for x in cloud.features])
            k_centered_row = cross - cross.mean() - gram_model.gram.mean(axis=0) + gram_model.grand_mean
            self_term = 1.0 - 2.0 * cross.mean() + gram_model.grand_mean
            expected = self_term
            for j in range(model.n_components):
                alpha = model.coefficients[:, j]
                beta_j = float(alpha @ k_centered_row)
                basis_norm = float(alpha @ centered @ alpha)
                expected += beta_j * beta_j * basis_norm - 2.0 * beta_j * beta_j
            assert abs(score - max(expected, 0.0)) <= 1e-8

    def test_dimension_mismatch(self):
        model = fit(10, 3, seed=22, m=3)
        with pytest.raises(DataError, match="expected"):
            reconstruction_error_score(model, np.ones((2, 2)))


class TestModelFile:
    def test_round_trip_scores_bit_exact(self, tmp_path):
        model = fit(14, 3, seed=23, m=5)
        path = tmp_path / "model.json"
        save_kpca_model(model, path)
        loaded = load_kpca_model(path)
        queries = np.random.default_rng(24).normal(size=(9, 3))
        np.testing.assert_array_equal(transform(loaded, queries), transform(model, queries))
        np.testing.assert_array_equal(
            reconstruction_error_score(loaded, queries),
            reconstruction_error_score(model, queries),
        )
        np.testing.assert_array_equal(loaded.train_embedding, model.train_embedding)

    def test_schema_keys(self, tmp_path):
        model = fit(8, 2, seed=25, m=3)
        path = tmp_path / "model.json"
        save_kpca_model(model, path)
        payload = json.loads(path.read_text())
        assert payload["format"] == "kpca-model"
        assert payload["version"] == 1
        assert set(payload) >= {
            "kernel",
            "eigenvalues",
            "coefficients",
            "row_means",
            "grand_mean",
            "training_features",
        }

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(DataError, match="not a kpca-model file"):
            load_kpca_model(path)

    def test_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(DataError, match="not valid JSON"):
            load_kpca_model(path)
