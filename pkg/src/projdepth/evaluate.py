"""ROC AUC, percentile thresholds, cross-validated random hyperparameter
search and the benchmark runner.

Protocol, per dataset and trial: stratified 60/40 train/test split,
hyperparameter search by seeded random sampling scored with stratified
k-fold cross-validation AUC on the training part (fits see the contaminated
fold, labels are used only to compute validation AUC), refit on the full
training part with the winner, ROC AUC on the held-out part.  Trials are
aggregated as mean plus sample standard deviation.

Seeding: each trial derives child seeds (split, search, final fit) from
``SeedSequence([master_seed, crc32(dataset_name), trial_index])``, so a
dataset's trials are reproducible and identical regardless of which other
datasets or detectors participate in the run.
"""

from __future__ import annotations

import time
import warnings
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .datasets import DataCloud, load_csv, stratified_kfold, stratified_split
from .depth import fit_krpd, fit_rpd, outlier_score
from .errors import DataError, NumericalError
from .kernels import KernelSpec, fit_gram
from .knn import fit_knn, knn_score
from .kpca import EffectiveRankWarning, fit_kpca, reconstruction_error_score
from .rff import fit_krpd_rff
from .rng import spawn_seeds

RPD = "rpd"
KRPD = "krpd"
KRPD_RFF = "krpd-rff"
KPCA = "kpca"
KNN = "knn"
DETECTOR_KINDS = (RPD, KRPD, KRPD_RFF, KPCA, KNN)

KNN_NEIGHBOR_GRID = (1, 5, 10, 20)

_DEPTH_KINDS = (RPD, KRPD, KRPD_RFF)


def roc_auc(scores, labels) -> float:
    """Probability that a random outlier outscores a random inlier, counting
    ties at half credit.

    Computed from mid-rank statistics; exactly equals the pairwise
    comparison count divided by n_outliers * n_inliers.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or scores.shape != labels.shape:
        raise DataError("scores and labels must be equal-length vectors")
    if not np.isfinite(scores).all():
        raise DataError("scores must be finite")
    if not np.isin(labels, (0, 1)).all():
        raise DataError("labels must be binary (0/1)")
    n_out = int((labels == 1).sum())
    n_in = labels.size - n_out
    if n_out == 0 or n_in == 0:
        raise DataError("both classes must be present to compute ROC AUC")
    ranks = rankdata(scores)
    return float((ranks[labels == 1].sum() - n_out * (n_out + 1) / 2.0) / (n_out * n_in))


def percentile_threshold(scores, contamination: float) -> float:
    """Score value at the ``100 * (1 - contamination)`` percentile, linearly
    interpolated between order statistics.

    Points scoring strictly above the threshold are flagged as outliers.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise DataError("cannot threshold an empty score vector")
    if not 0.0 < contamination < 1.0:
        raise DataError(f"contamination must lie in (0, 1), got {contamination}")
    return float(np.percentile(scores, 100.0 * (1.0 - contamination)))


def flag_outliers(scores, threshold: float) -> np.ndarray:
    """Boolean mask of points scoring strictly above the threshold."""
    return np.asarray(scores, dtype=np.float64) > threshold


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary for one scored set, or an aggregate over trials.

    ``confusion`` holds (tp, fp, tn, fn) at the percentile threshold; for an
    aggregate the counts are summed over trials and ``threshold``/``auc`` are
    trial means.
    """

    auc: float
    threshold: float
    confusion: tuple[int, int, int, int]
    n_trials_aggregated: int
    auc_mean: float
    auc_std: float


def evaluate_scores(scores, labels, contamination: float | None = None) -> EvalReport:
    """Build a single-trial report: AUC, percentile threshold (defaulting to
    the observed outlier fraction) and confusion counts at that threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    auc = roc_auc(scores, labels)
    if contamination is None:
        contamination = float((labels == 1).mean())
    threshold = percentile_threshold(scores, contamination)
    flagged = flag_outliers(scores, threshold)
    is_outlier = labels == 1
    tp = int((flagged & is_outlier).sum())
    fp = int((flagged & ~is_outlier).sum())
    tn = int((~flagged & ~is_outlier).sum())
    fn = int((~flagged & is_outlier).sum())
    return EvalReport(auc, threshold, (tp, fp, tn, fn), 1, auc, 0.0)


def aggregate_reports(reports) -> EvalReport:
    """Merge per-trial reports: mean/sample-std of AUC, mean threshold,
    summed confusion counts."""
    reports = list(reports)
    if not reports:
        raise DataError("nothing to aggregate")
    aucs = np.array([r.auc for r in reports])
    std = float(aucs.std(ddof=1)) if len(reports) > 1 else 0.0
    confusion = tuple(int(sum(r.confusion[i] for r in reports)) for i in range(4))
    mean = float(aucs.mean())
    threshold = float(np.mean([r.threshold for r in reports]))
    return EvalReport(mean, threshold, confusion, len(reports), mean, std)


@dataclass(frozen=True)
class SearchSpace:
    """Random-search ranges: gamma log-uniform, embedding size
    integer-uniform (capped at the fold rank when eigendecomposition is
    involved)."""

    gamma_range: tuple[float, float] = (1e-5, 1.0)
    m_range: tuple[int, int] = (10, 500)
    budget: int = 25
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma_range[0] <= self.gamma_range[1]:
            raise DataError(f"bad gamma_range {self.gamma_range}")
        if not 1 <= self.m_range[0] <= self.m_range[1]:
            raise DataError(f"bad m_range {self.m_range}")
        if self.budget < 1:
            raise DataError(f"budget must be at least 1, got {self.budget}")


@dataclass
class FittedDetector:
    """A fitted detector of any kind; ``score`` is oriented so that higher
    means more outlying."""

    kind: str
    model: object

    def score(self, features) -> np.ndarray:
        if self.kind in _DEPTH_KINDS:
            return outlier_score(self.model, features)
        if self.kind == KPCA:
            return reconstruction_error_score(self.model, features)
        return knn_score(self.model, features)


def fit_detector(kind: str, train: DataCloud, params: dict, n_directions: int = 1000, seed: int = 0) -> FittedDetector:
    """Fit one detector kind on a training cloud.

    ``params`` carries the kind's hyperparameters: ``gamma`` and
    ``n_components`` (krpd, kpca), ``gamma`` and ``n_features`` (krpd-rff),
    ``n_neighbors`` (knn); rpd takes none.
    """
    if kind == RPD:
        model: object = fit_rpd(train, n_directions, seed)
    elif kind == KRPD:
        spec = KernelSpec("rbf", params["gamma"])
        model = fit_krpd(train, spec, params["n_components"], n_directions, seed)
    elif kind == KRPD_RFF:
        model = fit_krpd_rff(train, params["gamma"], params["n_features"], n_directions, seed)
    elif kind == KPCA:
        spec = KernelSpec("rbf", params["gamma"])
        model = fit_kpca(fit_gram(spec, train), params["n_components"])
    elif kind == KNN:
        model = fit_knn(train, params["n_neighbors"])
    else:
        raise DataError(f"unknown detector kind {kind!r}; expected one of {DETECTOR_KINDS}")
    return FittedDetector(kind, model)


@dataclass(frozen=True)
class SearchResult:
    """Winning configuration of a random search."""

    params: dict
    cv_auc: float
    n_trials: int
    n_failed: int


def _sample_params(kind: str, rng: np.random.Generator, space: SearchSpace, max_fit_size: int) -> dict:
    params: dict = {}
    if kind in (KRPD, KRPD_RFF, KPCA):
        lo, hi = space.gamma_range
        params["gamma"] = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
    if kind in (KRPD, KPCA):
        hi = min(space.m_range[1], max_fit_size - 1)
        lo = min(space.m_range[0], hi)
        params["n_components"] = int(rng.integers(lo, hi + 1))
    if kind == KRPD_RFF:
        params["n_features"] = int(rng.integers(space.m_range[0], space.m_range[1] + 1))
    if kind == KNN:
        params["n_neighbors"] = int(min(rng.choice(KNN_NEIGHBOR_GRID), max_fit_size))
    return params


def random_search(
    train: DataCloud,
    space: SearchSpace,
    detector_kind: str,
    n_folds: int = 5,
    n_directions: int = 1000,
) -> SearchResult:
    """Seeded random hyperparameter search scored by stratified k-fold
    cross-validation AUC.

    Each trial samples one configuration, fits on every fold's training part
    and computes AUC on its validation part; the configuration with the best
    mean validation AUC wins (ties keep the earlier trial).  All trials share
    one set of per-fold fit seeds, so configurations are compared under
    identical direction draws.  A trial whose fit raises counts as failed
    with score -inf; only a search in which every trial fails raises.
    ``rpd`` has nothing to sample and is evaluated once.
    """
    if detector_kind not in DETECTOR_KINDS:
        raise DataError(f"unknown detector kind {detector_kind!r}; expected one of {DETECTOR_KINDS}")
    sampler_seed, fold_seed, fit_master = spawn_seeds(space.seed, 3)
    folds = stratified_kfold(train, n_folds, fold_seed)
    max_fit_size = min(plan.train_indices.size for plan in folds)
    # Common random numbers: every trial reuses the same per-fold fit seeds,
    # so configurations are compared under identical direction draws.
    fit_seeds = spawn_seeds(fit_master, n_folds)
    rng = np.random.default_rng(sampler_seed)
    budget = 1 if detector_kind == RPD else space.budget
    best: tuple[float, dict] | None = None
    n_failed = 0
    for _ in range(budget):
        params = _sample_params(detector_kind, rng, space, max_fit_size)
        try:
            fold_aucs = []
            with warnings.catch_warnings():
                # Sampling beyond the fold rank is expected during a search.
                warnings.simplefilter("ignore", EffectiveRankWarning)
                for plan, fit_seed in zip(folds, fit_seeds):
                    detector = fit_detector(
                        detector_kind, train.take(plan.train_indices), params, n_directions, fit_seed
                    )
                    validation = train.take(plan.test_indices)
                    fold_aucs.append(roc_auc(detector.score(validation.features), validation.labels))
            score = float(np.mean(fold_aucs))
        except (DataError, NumericalError, np.linalg.LinAlgError):
            n_failed += 1
            score = float("-inf")
        if best is None or score > best[0]:
            best = (score, params)
    assert best is not None
    if best[0] == float("-inf"):
        raise NumericalError(f"random search failed: all {budget} trial(s) raised")
    return SearchResult(best[1], best[0], budget, n_failed)


@dataclass(frozen=True)
class BenchmarkCell:
    """One dataset x detector cell of a benchmark run."""

    dataset: str
    detector: str
    report: EvalReport | None
    params: dict | None
    n_directions: int
    seconds: float
    error: str | None = None


def _named_cloud(entry) -> tuple[str, DataCloud]:
    if isinstance(entry, (str, Path)):
        path = Path(entry)
        return path.stem, load_csv(path, "label")
    name, cloud = entry
    return str(name), cloud


def _dataset_entropy(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _median_trial(reports) -> int:
    order = np.argsort([r.auc for r in reports], kind="stable")
    return int(order[(len(reports) - 1) // 2])


def run_benchmark(
    datasets,
    detector_kinds,
    trials: int = 5,
    seed: int = 0,
    budget: int = 25,
    n_directions: int = 1000,
    train_fraction: float = 0.6,
    n_folds: int = 5,
) -> list[BenchmarkCell]:
    """Run the full protocol for every dataset x detector pair.

    ``datasets`` holds CSV paths (loaded with their ``label`` column) or
    ``(name, DataCloud)`` pairs.  Reported hyperparameters come from the
    trial whose test AUC is the median.  A failing cell records its error and
    the run continues.
    """
    named = [_named_cloud(entry) for entry in datasets]
    kinds = list(detector_kinds)
    for kind in kinds:
        if kind not in DETECTOR_KINDS:
            raise DataError(f"unknown detector kind {kind!r}; expected one of {DETECTOR_KINDS}")
    if trials < 1:
        raise DataError(f"trials must be at least 1, got {trials}")
    cells = []
    for name, cloud in named:
        trial_seeds = [spawn_seeds([seed, _dataset_entropy(name), t], 3) for t in range(trials)]
        for kind in kinds:
            started = time.perf_counter()
            try:
                reports, winners = [], []
                for split_seed, search_seed, fit_seed in trial_seeds:
                    plan = stratified_split(cloud, train_fraction, split_seed)
                    train = cloud.take(plan.train_indices)
                    test = cloud.take(plan.test_indices)
                    space = SearchSpace(budget=budget, seed=search_seed)
                    result = random_search(train, space, kind, n_folds, n_directions)
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", EffectiveRankWarning)
                        detector = fit_detector(kind, train, result.params, n_directions, fit_seed)
                        scores = detector.score(test.features)
                    reports.append(evaluate_scores(scores, test.labels))
                    winners.append(result.params)
                elapsed = time.perf_counter() - started
                cells.append(
                    BenchmarkCell(
                        name,
                        kind,
                        aggregate_reports(reports),
                        winners[_median_trial(reports)],
                        n_directions,
                        elapsed,
                    )
                )
            except (DataError, NumericalError, np.linalg.LinAlgError, OSError) as exc:
                elapsed = time.perf_counter() - started
                cells.append(
                    BenchmarkCell(name, kind, None, None, n_directions, elapsed, f"{type(exc).__name__}: {exc}")
                )
    return cells
