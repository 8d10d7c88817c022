"""Kernel principal component analysis with out-of-sample projection,
reconstruction-error scoring, and a JSON model file.

Fitting eigendecomposes the doubly centered Gram matrix K', keeps the
leading eigenpairs whose eigenvalues clear a rank threshold, and rescales
each kept eigenvector by 1 / sqrt(eigenvalue) so the matching feature-space
direction has unit norm (lambda_j * <alpha_j, alpha_j> = 1).  Training
coordinates are then K' @ coefficients; a query projects through its
centered kernel row.

The reconstruction-error score of a query is its squared feature-space
distance to the projection onto the kept components,

    score(q) = centered_self_kernel(q) - sum_j beta_j(q)^2

clamped at zero; higher means more outlying.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import DataCloud
from .errors import DataError, NumericalError
from .kernels import (
    GramModel,
    KernelSpec,
    _center_rows,
    centered_gram,
    cross_gram_centered,
    kernel_diag,
    kernel_matrix,
)

KPCA_MODEL_FORMAT = "kpca-model"
KPCA_MODEL_VERSION = 1


class EffectiveRankWarning(UserWarning):
    """Requested component count exceeded the usable rank of the centered
    Gram matrix; the model was capped."""


def rank_threshold(largest_eigenvalue: float, n_samples: int) -> float:
    """Eigenvalues at or below this are unusable: dividing by sqrt(lambda)
    would amplify noise."""
    return max(1e-10, 1e-12 * max(largest_eigenvalue, 0.0)) * n_samples


@dataclass
class KpcaModel:
    """Top eigenpairs of the centered Gram matrix plus derived training
    coordinates.

    ``coefficients`` column j equals the unit eigenvector of K' divided by
    sqrt(lambda_j), sign-fixed so its largest-magnitude entry is positive;
    ``train_embedding`` equals K' @ coefficients, so its column variances are
    lambda_j / N and its column means vanish.
    """

    coefficients: np.ndarray
    eigenvalues: np.ndarray
    gram_model: GramModel
    train_embedding: np.ndarray

    @property
    def n_components(self) -> int:
        return self.coefficients.shape[1]

    def transform(self, queries: np.ndarray) -> np.ndarray:
        return transform(self, queries)


def fit_kpca(gram_model: GramModel, n_components: int) -> KpcaModel:
    """Fit kernel PCA from a fitted Gram model.

    Parameters
    ----------
    gram_model : GramModel
        Output of :func:`projdepth.kernels.fit_gram`.
    n_components : int
        Requested embedding size, between 1 and N - 1.  When the usable rank
        of the centered Gram matrix is smaller, the model is capped to it and
        an :class:`EffectiveRankWarning` is emitted; a usable rank of zero
        raises :class:`NumericalError`.
    """
    n = gram_model.n_samples
    if not 1 <= n_components <= n - 1:
        raise DataError(f"n_components must lie in [1, {n - 1}], got {n_components}")
    centered = centered_gram(gram_model)
    eigenvalues, eigenvectors = np.linalg.eigh(centered)
    eigenvalues = eigenvalues[::-1]
    eigenvectors = eigenvectors[:, ::-1]
    threshold = rank_threshold(float(eigenvalues[0]), n)
    usable = int(np.count_nonzero(eigenvalues > threshold))
    if usable == 0:
        raise NumericalError(
            "centered Gram matrix has no usable spectrum (all eigenvalues below the rank threshold)"
        )
    effective = min(n_components, usable)
    if effective < n_components:
        warnings.warn(
            f"requested {n_components} components but the centered Gram matrix "
            f"supports only {usable}; keeping {usable}",
            EffectiveRankWarning,
            stacklevel=2,
        )
    lam = eigenvalues[:effective].copy()
    vectors = eigenvectors[:, :effective].copy()
    # Deterministic sign: the largest-magnitude entry of each column is positive.
    flip = np.sign(vectors[np.abs(vectors).argmax(axis=0), np.arange(effective)])
    flip[flip == 0] = 1.0
    vectors *= flip
    coefficients = vectors / np.sqrt(lam)
    train_embedding = centered @ coefficients
    for array in (coefficients, lam, train_embedding):
        array.setflags(write=False)
    return KpcaModel(coefficients, lam, gram_model, train_embedding)


def transform(model: KpcaModel, queries: np.ndarray) -> np.ndarray:
    """Project queries onto the kept components.

    Rows of the training cloud reproduce ``train_embedding`` exactly.
    """
    return cross_gram_centered(model.gram_model, queries) @ model.coefficients


def reconstruction_error_score(model: KpcaModel, queries: np.ndarray) -> np.ndarray:
    """Squared feature-space distance of each query to its projection onto
    the kept components; non-negative, higher = more outlying."""
    queries = np.asarray(queries, dtype=np.float64)
    gram_model = model.gram_model
    expected = gram_model.training_cloud.n_dims
    if queries.ndim != 2:
        raise DataError("queries must form a 2-dimensional matrix")
    if queries.shape[1] != expected:
        raise DataError(f"queries have dimension {queries.shape[1]}, expected {expected}")
    scores = np.empty(queries.shape[0])
    block = max(1, 4_000_000 // gram_model.n_samples)
    for start in range(0, queries.shape[0], block):
        chunk = queries[start : start + block]
        rows = kernel_matrix(gram_model.spec, chunk, gram_model.training_cloud.features)
        row_means = rows.mean(axis=1)
        beta = _center_rows(rows, row_means, gram_model) @ model.coefficients
        centered_self = kernel_diag(gram_model.spec, chunk) - 2.0 * row_means + gram_model.grand_mean
        scores[start : start + block] = centered_self - np.einsum("ij,ij->i", beta, beta)
    return np.maximum(scores, 0.0)


def save_kpca_model(model: KpcaModel, path) -> None:
    """Write a JSON model file sufficient to score queries without refitting.

    Schema (version 1): ``format``, ``version``, ``kernel`` (family, gamma),
    ``eigenvalues``, ``coefficients`` (N x M, row major), ``row_means``,
    ``grand_mean`` and ``training_features`` (N x d, row major).  Floats are
    serialized at full precision.
    """
    gram_model = model.gram_model
    payload = {
        "format": KPCA_MODEL_FORMAT,
        "version": KPCA_MODEL_VERSION,
        "kernel": {"family": gram_model.spec.family, "gamma": gram_model.spec.gamma},
        "eigenvalues": model.eigenvalues.tolist(),
        "coefficients": model.coefficients.tolist(),
        "row_means": gram_model.row_means.tolist(),
        "grand_mean": gram_model.grand_mean,
        "training_features": gram_model.training_cloud.features.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_kpca_model(path) -> KpcaModel:
    """Rebuild a model from :func:`save_kpca_model` output.

    The Gram matrix is re-evaluated from the stored training features; the
    stored centering statistics and coefficients are used verbatim, so the
    loaded model scores queries exactly like the original.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict) or data.get("format") != KPCA_MODEL_FORMAT:
        raise DataError(f"{path}: not a {KPCA_MODEL_FORMAT} file")
    try:
        spec = KernelSpec(data["kernel"]["family"], float(data["kernel"]["gamma"]))
        features = np.array(data["training_features"], dtype=np.float64)
        row_means = np.array(data["row_means"], dtype=np.float64)
        grand_mean = float(data["grand_mean"])
        coefficients = np.array(data["coefficients"], dtype=np.float64)
        eigenvalues = np.array(data["eigenvalues"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed model file ({exc})") from None
    cloud = DataCloud(features)
    if coefficients.ndim != 2 or coefficients.shape[0] != cloud.n_samples:
        raise DataError(f"{path}: coefficients shape {coefficients.shape} does not match N={cloud.n_samples}")
    if row_means.shape != (cloud.n_samples,):
        raise DataError(f"{path}: row_means length {row_means.shape} does not match N={cloud.n_samples}")
    if eigenvalues.shape != (coefficients.shape[1],):
        raise DataError(f"{path}: eigenvalue count does not match coefficient columns")
    gram = kernel_matrix(spec, cloud.features, cloud.features)
    gram.setflags(write=False)
    row_means.setflags(write=False)
    gram_model = GramModel(gram, row_means, grand_mean, spec, cloud)
    train_embedding = centered_gram(gram_model) @ coefficients
    for array in (coefficients, eigenvalues, train_embedding):
        array.setflags(write=False)
    return KpcaModel(coefficients, eigenvalues, gram_model, train_embedding)
