"""Positive-definite kernels, dense Gram matrices and double centering.

Kernel values for a fit and for later queries go through the same code path
(:func:`kernel_matrix`), so scoring a training point reproduces its Gram row
bit for bit.  Centering statistics (row means and the grand mean) are frozen
at fit time; queries never alter them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .datasets import DataCloud
from .errors import DataError

KERNEL_FAMILIES = ("rbf", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth parameter.

    ``rbf`` is the working kernel, k(x, y) = exp(-gamma * ||x - y||^2).
    ``linear`` (k(x, y) = <x, y>) ships only so kernel PCA can be
    cross-checked against ordinary PCA.
    """

    family: str = "rbf"
    gamma: float = 0.25

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise DataError(f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}")
        if not (0.0 < self.gamma < math.inf):
            raise DataError(f"gamma must be positive and finite, got {self.gamma}")


@dataclass
class GramModel:
    """Trained Gram matrix with the centering statistics needed to center
    out-of-sample kernel rows against the training cloud."""

    gram: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    spec: KernelSpec
    training_cloud: DataCloud

    @property
    def n_samples(self) -> int:
        return self.gram.shape[0]


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Evaluate the kernel on every pair (row of ``a``, row of ``b``)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DataError("kernel inputs must be 2-dimensional matrices")
    if a.shape[1] != b.shape[1]:
        raise DataError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if spec.family == "rbf":
        return np.exp(-spec.gamma * cdist(a, b, "sqeuclidean"))
    return a @ b.T


def kernel_diag(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    """Self-kernel values k(x, x) for every row of ``points``."""
    points = np.asarray(points, dtype=np.float64)
    if spec.family == "rbf":
        return np.ones(points.shape[0])
    return np.einsum("ij,ij->i", points, points)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel on a single pair of vectors."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DataError("kernel inputs must be finite")
    return float(kernel_matrix(spec, x, y)[0, 0])


def fit_gram(spec: KernelSpec, cloud: DataCloud) -> GramModel:
    """Evaluate the kernel on all training pairs and freeze the centering
    statistics (per-row means and the grand mean)."""
    gram = kernel_matrix(spec, cloud.features, cloud.features)
    row_means = gram.mean(axis=1)
    grand_mean = float(gram.mean())
    gram.setflags(write=False)
    row_means.setflags(write=False)
    return GramModel(gram, row_means, grand_mean, spec, cloud)


def _center_rows(kernel_rows: np.ndarray, kernel_row_means: np.ndarray, model: GramModel) -> np.ndarray:
    # One shared expression for training and query rows: a query row equal to
    # a training row must center to the same bits.
    return kernel_rows - kernel_row_means[:, None] - model.row_means[None, :] + model.grand_mean


def centered_gram(model: GramModel) -> np.ndarray:
    """The doubly centered Gram matrix; every row and column sums to ~0."""
    return _center_rows(model.gram, model.row_means, model)


def cross_gram_centered(model: GramModel, queries: np.ndarray) -> np.ndarray:
    """Kernel rows of ``queries`` against the training cloud, centered with
    the training statistics.

    For queries taken from the training cloud itself the result reproduces
    the corresponding rows of :func:`centered_gram` exactly.
    """
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2:
        raise DataError("queries must form a 2-dimensional matrix")
    expected = model.training_cloud.n_dims
    if queries.shape[1] != expected:
        raise DataError(f"queries have dimension {queries.shape[1]}, expected {expected}")
    rows = kernel_matrix(model.spec, queries, model.training_cloud.features)
    return _center_rows(rows, rows.mean(axis=1), model)
