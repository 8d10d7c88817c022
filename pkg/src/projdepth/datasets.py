"""Data clouds, synthetic benchmark generators, CSV round-tripping and
stratified splitting.

Every synthetic cloud follows one recipe: 400 two-dimensional samples, of
which 300 are inliers from a kind-specific generator and 100 are outliers
drawn uniformly from the [-6, 6] x [-6, 6] box.  Labels mark outliers
with 1.

CSV layout: UTF-8, comma separated, one header row, feature columns named
``f0 .. f{d-1}`` and an optional ``label`` column with values 0/1.  Floats
are written with 17 significant digits so a round trip reproduces the cloud
exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

TOY_KINDS = ("unimodal", "multimodal", "cross", "moons")

TOY_N_INLIERS = 300
TOY_N_OUTLIERS = 100
TOY_BOX_HALF_WIDTH = 6.0

LABEL_COLUMN = "label"

_NORMAL_SCALE = 0.3
_SEGMENT_NOISE = 0.05
_SEGMENT_HALF_LENGTH = 3.0
# Any well-separated triple inside the outlier box would do; this one is a
# fixed convention of the package.
_MULTIMODAL_CENTERS = ((-2.0, -2.0), (2.0, -2.0), (0.0, 2.0))

_FLOAT_FMT = "{:.17g}"


@dataclass
class DataCloud:
    """An N x d sample matrix with optional binary labels (1 = outlier).

    Instances are frozen after construction: the arrays are validated copies
    with the writeable flag cleared, so a cloud can be shared freely across
    threads.
    """

    features: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DataError(f"features must be 2-dimensional, got shape {features.shape}")
        if features.shape[0] < 1 or features.shape[1] < 1:
            raise DataError(f"features must be at least 1 x 1, got shape {features.shape}")
        if not np.isfinite(features).all():
            raise DataError("features contain NaN or infinite entries")
        features.setflags(write=False)
        self.features = features
        if self.labels is not None:
            raw = np.asarray(self.labels)
            if raw.shape != (features.shape[0],):
                raise DataError(
                    f"labels must have length {features.shape[0]}, got shape {raw.shape}"
                )
            if not np.isin(raw, (0, 1)).all():
                raise DataError("labels must be 0 (inlier) or 1 (outlier)")
            labels = raw.astype(np.int64)
            labels.setflags(write=False)
            self.labels = labels

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_dims(self) -> int:
        return self.features.shape[1]

    def take(self, indices) -> "DataCloud":
        """Return the sub-cloud at ``indices``, keeping labels when present."""
        idx = np.asarray(indices, dtype=np.intp)
        labels = None if self.labels is None else self.labels[idx]
        return DataCloud(self.features[idx], labels)


@dataclass(frozen=True)
class SplitPlan:
    """Disjoint train/test index sets covering one cloud, plus the seed used."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


def generate_toy(kind: str, seed: int) -> DataCloud:
    """Generate one of the four synthetic benchmark clouds.

    Parameters
    ----------
    kind : str
        ``unimodal``
            standard normal scaled by 0.3.
        ``multimodal``
            100 points each from scale-0.3 normals centred at (-2, -2),
            (2, -2) and (0, 2).
        ``cross``
            two perpendicular segments of half-length 3 through the origin,
            uniform along each segment, plus isotropic Gaussian noise of
            scale 0.05.
        ``moons``
            two interleaved unit semicircles (upper centred at the origin,
            lower reflected and centred at (1, 0.5)), plus Gaussian noise of
            scale 0.05.
    seed : int
        Drives every draw; equal ``(kind, seed)`` pairs produce bit-identical
        clouds.

    Returns
    -------
    DataCloud
        400 samples in 2 dimensions: 300 labelled 0 (inliers) followed by
        100 labelled 1 (outliers, uniform on the [-6, 6] square).
    """
    kind = str(kind).lower()
    rng = np.random.default_rng(seed)
    if kind == "unimodal":
        inliers = _NORMAL_SCALE * rng.standard_normal((TOY_N_INLIERS, 2))
    elif kind == "multimodal":
        per_mode = TOY_N_INLIERS // len(_MULTIMODAL_CENTERS)
        parts = [
            np.asarray(center) + _NORMAL_SCALE * rng.standard_normal((per_mode, 2))
            for center in _MULTIMODAL_CENTERS
        ]
        inliers = np.vstack(parts)
    elif kind == "cross":
        half = TOY_N_INLIERS // 2
        horizontal = np.column_stack(
            [rng.uniform(-_SEGMENT_HALF_LENGTH, _SEGMENT_HALF_LENGTH, half), np.zeros(half)]
        )
        vertical = np.column_stack(
            [np.zeros(half), rng.uniform(-_SEGMENT_HALF_LENGTH, _SEGMENT_HALF_LENGTH, half)]
        )
        inliers = np.vstack([horizontal, vertical])
        inliers = inliers + _SEGMENT_NOISE * rng.standard_normal(inliers.shape)
    elif kind == "moons":
        half = TOY_N_INLIERS // 2
        angles = np.linspace(0.0, np.pi, half)
        upper = np.column_stack([np.cos(angles), np.sin(angles)])
        lower = np.column_stack([1.0 - np.cos(angles), 0.5 - np.sin(angles)])
        inliers = np.vstack([upper, lower])
        inliers = inliers + _SEGMENT_NOISE * rng.standard_normal(inliers.shape)
    else:
        raise DataError(f"unknown toy kind {kind!r}; expected one of {TOY_KINDS}")
    outliers = rng.uniform(-TOY_BOX_HALF_WIDTH, TOY_BOX_HALF_WIDTH, (TOY_N_OUTLIERS, 2))
    features = np.vstack([inliers, outliers])
    labels = np.concatenate(
        [np.zeros(TOY_N_INLIERS, dtype=np.int64), np.ones(TOY_N_OUTLIERS, dtype=np.int64)]
    )
    return DataCloud(features, labels)


def stratified_split(cloud: DataCloud, train_fraction: float, seed: int) -> SplitPlan:
    """Split a labelled cloud class by class.

    Each class contributes ``floor(train_fraction * class_size)`` samples to
    the train side; the remainder goes to the test side, so class proportions
    match the full cloud up to integer rounding.  Shuffling within each class
    is driven by ``seed``; the returned index arrays are sorted.
    """
    if cloud.labels is None:
        raise DataError("labels required for a stratified split")
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for value in np.unique(cloud.labels):
        members = np.flatnonzero(cloud.labels == value)
        if members.size < 2:
            raise DataError(f"class {value} has {members.size} member(s); need at least 2")
        order = rng.permutation(members)
        n_train = math.floor(train_fraction * members.size)
        train_parts.append(order[:n_train])
        test_parts.append(order[n_train:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    train.setflags(write=False)
    test.setflags(write=False)
    return SplitPlan(train, test, int(seed))


def stratified_kfold(cloud: DataCloud, k: int, seed: int) -> list[SplitPlan]:
    """Partition a labelled cloud into ``k`` stratified cross-validation folds.

    Every sample lands in exactly one validation fold (the plan's
    ``test_indices``), and each fold's class ratios match the cloud up to
    rounding.  Requires every class to have at least ``k`` members.
    """
    if cloud.labels is None:
        raise DataError("labels required for stratified k-fold")
    if k < 2:
        raise DataError(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    fold_members: list[list[np.ndarray]] = [[] for _ in range(k)]
    for value in np.unique(cloud.labels):
        members = np.flatnonzero(cloud.labels == value)
        if members.size < k:
            raise DataError(f"class {value} has {members.size} members, fewer than k={k}")
        order = rng.permutation(members)
        for fold, chunk in enumerate(np.array_split(order, k)):
            fold_members[fold].append(chunk)
    everything = np.arange(cloud.n_samples)
    plans = []
    for fold in range(k):
        validation = np.sort(np.concatenate(fold_members[fold]))
        train = np.setdiff1d(everything, validation)
        validation.setflags(write=False)
        train.setflags(write=False)
        plans.append(SplitPlan(train, validation, int(seed)))
    return plans


def load_csv(path, label_column: str | None = None) -> DataCloud:
    """Load a cloud from a headered numeric CSV.

    Feature columns keep the header order; ``label_column``, when given,
    names the column parsed as binary labels (0/1).  Cell-level failures
    report the file line number and the column name.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column is not None and label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r} in header {header}")
        label_pos = header.index(label_column) if label_column is not None else None
        feature_pos = [i for i in range(len(header)) if i != label_pos]
        if not feature_pos:
            raise DataError(f"{path}: no feature columns")
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {len(header)}"
                )
            values = []
            for pos in feature_pos:
                values.append(_parse_feature(row[pos], path, lineno, header[pos]))
            rows.append(values)
            if label_pos is not None:
                labels.append(_parse_label(row[label_pos], path, lineno, header[label_pos]))
    if not rows:
        raise DataError(f"{path}: no data rows")
    features = np.array(rows, dtype=np.float64)
    return DataCloud(features, np.array(labels, dtype=np.int64) if label_pos is not None else None)


def save_csv(cloud: DataCloud, path) -> None:
    """Write a cloud as CSV with columns ``f0 .. f{d-1}`` plus ``label`` when
    labels are present.  ``load_csv`` reproduces the cloud exactly."""
    path = Path(path)
    header = [f"f{j}" for j in range(cloud.n_dims)]
    if cloud.labels is not None:
        header.append(LABEL_COLUMN)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for i in range(cloud.n_samples):
            row = [_FLOAT_FMT.format(v) for v in cloud.features[i]]
            if cloud.labels is not None:
                row.append(str(int(cloud.labels[i])))
            writer.writerow(row)


def _parse_feature(cell: str, path: Path, lineno: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"{path}: line {lineno}, column {column!r}: could not parse {cell!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"{path}: line {lineno}, column {column!r}: non-finite value {cell!r}")
    return value


def _parse_label(cell: str, path: Path, lineno: int, column: str) -> int:
    try:
        value = float(cell)
    except ValueError:
        value = math.nan
    if value not in (0.0, 1.0):
        raise DataError(f"{path}: line {lineno}, column {column!r}: label {cell!r} is not 0 or 1")
    return int(value)
