"""Random projection outlyingness, depth and outlier scores.

A scorer is fit once on a training cloud: it freezes L random unit
directions together with the median (MED) and median absolute deviation
(MAD) of the training projections along each direction.  Scoring then takes
the worst robust standardized deviation over the non-degenerate directions,

    outlyingness(x) = max_l |<u_l, x> - med_l| / mad_l
    depth(x)        = 1 / (1 + outlyingness(x))
    outlier_score   = -depth(x)

Queries never alter the frozen statistics.  With an embedding attached
(kernel PCA coordinates or a random Fourier feature map) queries pass
through it first, which turns the same statistic into its kernelized
variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import DataCloud
from .errors import DataError, NumericalError
from .kernels import KernelSpec, fit_gram
from .kpca import fit_kpca

# Directions whose training MAD falls below 1e-12 * max(1, median |projection|)
# are excluded from the max instead of yielding infinite outlyingness.
MAD_EXCLUSION_SCALE = 1e-12

_BLOCK_ELEMENTS = 4_000_000  # ~32 MB of float64 per projection block


@dataclass(frozen=True)
class DirectionSet:
    """L unit vectors drawn uniformly from the sphere, plus their seed.

    Rows are drawn generator-order, so for a fixed seed the first L' rows of
    a larger set coincide with the smaller set: direction sets are nested.
    """

    directions: np.ndarray
    seed: int

    @property
    def n_directions(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


@dataclass
class DepthScorer:
    """Frozen projection statistics; scoring never re-estimates them.

    ``embedding`` is any object with a ``transform(features) -> ndarray``
    method (a kernel PCA model or a random Fourier feature map) or None for
    plain input-space scoring; ``active`` masks the usable directions.
    """

    directions: DirectionSet
    medians: np.ndarray
    mads: np.ndarray
    space_dim: int
    embedding: object | None = None
    active: np.ndarray | None = None

    def outlyingness(self, queries) -> np.ndarray:
        return outlyingness(self, queries)

    def depth(self, queries) -> np.ndarray:
        return depth(self, queries)

    def outlier_score(self, queries) -> np.ndarray:
        return outlier_score(self, queries)


def median(values) -> float:
    """Middle order statistic; even-length input averages the two middle
    values."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DataError("median requires a non-empty 1-D vector")
    if not np.isfinite(v).all():
        raise DataError("median requires finite values")
    return float(np.median(v))


def mad(values) -> float:
    """Median absolute deviation around the median; no consistency factor."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DataError("mad requires a non-empty 1-D vector")
    if not np.isfinite(v).all():
        raise DataError("mad requires finite values")
    return float(np.median(np.abs(v - np.median(v))))


def sample_directions(dim: int, count: int, seed: int) -> DirectionSet:
    """Draw ``count`` iid directions uniformly from the unit sphere in
    ``dim`` dimensions (normalized standard normal vectors), deterministically
    per seed."""
    if dim < 1 or count < 1:
        raise DataError(f"need dim >= 1 and count >= 1, got dim={dim}, count={count}")
    raw = np.random.default_rng(seed).standard_normal((count, dim))
    norms = np.linalg.norm(raw, axis=1)
    if not (norms > 0).all():
        raise NumericalError("degenerate direction draw (zero vector)")
    directions = raw / norms[:, None]
    directions.setflags(write=False)
    return DirectionSet(directions, int(seed))


def _projection_stats(points: np.ndarray, directions: np.ndarray):
    projections = points @ directions.T
    medians = np.median(projections, axis=0)
    mads = np.median(np.abs(projections - medians), axis=0)
    floor = MAD_EXCLUSION_SCALE * np.maximum(1.0, np.median(np.abs(projections), axis=0))
    return medians, mads, mads >= floor


def _fit_scorer(points: np.ndarray, n_directions: int, seed: int, embedding) -> DepthScorer:
    directions = sample_directions(points.shape[1], n_directions, seed)
    medians, mads, active = _projection_stats(points, directions.directions)
    if not active.any():
        raise NumericalError(
            "degenerate projections: every direction has zero spread (MAD below the exclusion floor)"
        )
    for array in (medians, mads, active):
        array.setflags(write=False)
    return DepthScorer(directions, medians, mads, points.shape[1], embedding, active)


def fit_rpd(cloud: DataCloud, n_directions: int = 1000, seed: int = 0) -> DepthScorer:
    """Fit the input-space scorer: unit directions in the cloud's dimension
    plus per-direction MED/MAD of the projected training cloud."""
    if cloud.n_samples < 2:
        raise DataError("need at least 2 training samples")
    return _fit_scorer(cloud.features, n_directions, seed, None)


def fit_krpd(
    cloud: DataCloud,
    spec: KernelSpec,
    n_components: int,
    n_directions: int = 1000,
    seed: int = 0,
) -> DepthScorer:
    """Fit the kernelized scorer: kernel PCA embedding of the cloud, then
    projection statistics inside the embedding.

    Directions are sampled in the embedding's effective dimension with
    ``seed`` passed straight through, so fitting an input-space scorer on the
    embedding coordinates with the same seed reproduces this scorer exactly.
    """
    if cloud.n_samples < 2:
        raise DataError("need at least 2 training samples")
    model = fit_kpca(fit_gram(spec, cloud), n_components)
    return _fit_scorer(model.train_embedding, n_directions, seed, model)


def outlyingness(scorer: DepthScorer, queries) -> np.ndarray:
    """Worst robust standardized deviation over the scorer's active
    directions; always >= 0."""
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2:
        raise DataError("queries must form a 2-dimensional matrix")
    if scorer.embedding is None and queries.shape[1] != scorer.space_dim:
        raise DataError(f"queries have dimension {queries.shape[1]}, expected {scorer.space_dim}")
    directions = scorer.directions.directions[scorer.active]
    medians = scorer.medians[scorer.active]
    mads = scorer.mads[scorer.active]
    result = np.empty(queries.shape[0])
    block = max(1, _BLOCK_ELEMENTS // max(directions.shape[0], 1))
    for start in range(0, queries.shape[0], block):
        chunk = queries[start : start + block]
        if scorer.embedding is not None:
            chunk = scorer.embedding.transform(chunk)
        projections = chunk @ directions.T
        result[start : start + block] = np.max(np.abs(projections - medians) / mads, axis=1)
    return result


def depth(scorer: DepthScorer, queries) -> np.ndarray:
    """Elementwise 1 / (1 + outlyingness); values in (0, 1]."""
    return 1.0 / (1.0 + outlyingness(scorer, queries))


def outlier_score(scorer: DepthScorer, queries) -> np.ndarray:
    """Negative depth: higher = more outlying; values in [-1, 0)."""
    return -depth(scorer, queries)
