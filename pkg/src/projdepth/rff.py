"""Random Fourier feature maps approximating the RBF kernel.

A map of D features draws frequencies from N(0, 2 * gamma * I) and phases
from U[0, 2pi); the feature vector is

    z(x)_i = sqrt(2 / D) * cos(<w_i, x> + b_i)

so <z(x), z(y)> is an unbiased Monte Carlo estimate of
exp(-gamma * ||x - y||^2).  Feeding the mapped cloud straight into the
projection-depth fit gives the kernelized scorer without the principal
component step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import DataCloud
from .depth import DepthScorer, _fit_scorer
from .errors import DataError
from .rng import spawn_seeds


@dataclass(frozen=True)
class RffMap:
    """Frozen random Fourier feature map for one RBF bandwidth."""

    frequencies: np.ndarray  # D x d, rows ~ N(0, 2 * gamma * I)
    phases: np.ndarray  # D, uniform on [0, 2pi)
    gamma: float
    seed: int

    @property
    def n_features(self) -> int:
        return self.frequencies.shape[0]

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]

    def transform(self, points) -> np.ndarray:
        return rff_transform(self, points)


def fit_rff(gamma: float, dim: int, n_features: int, seed: int) -> RffMap:
    """Draw a feature map: frequencies from N(0, 2 * gamma * I), phases from
    U[0, 2pi), deterministically per seed."""
    if not gamma > 0:
        raise DataError(f"gamma must be positive, got {gamma}")
    if dim < 1 or n_features < 1:
        raise DataError(f"need dim >= 1 and n_features >= 1, got dim={dim}, n_features={n_features}")
    rng = np.random.default_rng(seed)
    frequencies = rng.normal(0.0, np.sqrt(2.0 * gamma), (n_features, dim))
    phases = rng.uniform(0.0, 2.0 * np.pi, n_features)
    frequencies.setflags(write=False)
    phases.setflags(write=False)
    return RffMap(frequencies, phases, float(gamma), int(seed))


def rff_transform(feature_map: RffMap, points) -> np.ndarray:
    """Map points into feature space; ||z(x)||^2 <= 2 for every x."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise DataError("points must form a 2-dimensional matrix")
    if points.shape[1] != feature_map.dim:
        raise DataError(f"points have dimension {points.shape[1]}, expected {feature_map.dim}")
    return np.sqrt(2.0 / feature_map.n_features) * np.cos(
        points @ feature_map.frequencies.T + feature_map.phases
    )


def fit_krpd_rff(
    cloud: DataCloud,
    gamma: float,
    n_features: int,
    n_directions: int = 1000,
    seed: int = 0,
) -> DepthScorer:
    """Map the cloud through a fresh feature map, then fit the
    projection-depth scorer in feature space (no centering, no PCA).

    One seed drives both random stages; child seeds for the map and for the
    directions come from :func:`projdepth.rng.spawn_seeds`.  The returned
    scorer carries the map, so queries are transformed identically.
    """
    if cloud.n_samples < 2:
        raise DataError("need at least 2 training samples")
    map_seed, direction_seed = spawn_seeds(seed, 2)
    feature_map = fit_rff(gamma, cloud.n_dims, n_features, map_seed)
    mapped = rff_transform(feature_map, cloud.features)
    return _fit_scorer(mapped, n_directions, direction_seed, feature_map)
