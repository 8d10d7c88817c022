"""Projection-depth outlier detection.

Random projection depth scores a point by its worst robust standardized
deviation over random one-dimensional projections of a data cloud; the
kernelized variant computes the same statistic in a kernel principal
component embedding, so the central region can follow multimodal and
non-convex clouds.  The package also ships a random Fourier feature path
(the "no principal components" ablation), a kernel PCA reconstruction-error
detector, a k-nearest-neighbor baseline, and a ROC-AUC benchmark harness
with stratified splits and cross-validated random search.
"""

from .datasets import (
    DataCloud,
    SplitPlan,
    generate_toy,
    load_csv,
    save_csv,
    stratified_kfold,
    stratified_split,
)
from .depth import (
    DepthScorer,
    DirectionSet,
    depth,
    fit_krpd,
    fit_rpd,
    mad,
    median,
    outlier_score,
    outlyingness,
    sample_directions,
)
from .errors import DataError, NumericalError
from .evaluate import (
    DETECTOR_KINDS,
    EvalReport,
    SearchResult,
    SearchSpace,
    aggregate_reports,
    evaluate_scores,
    fit_detector,
    flag_outliers,
    percentile_threshold,
    random_search,
    roc_auc,
    run_benchmark,
)
from .kernels import (
    GramModel,
    KernelSpec,
    centered_gram,
    cross_gram_centered,
    fit_gram,
    kernel_eval,
)
from .knn import KnnModel, fit_knn, knn_score
from .kpca import (
    EffectiveRankWarning,
    KpcaModel,
    fit_kpca,
    load_kpca_model,
    reconstruction_error_score,
    save_kpca_model,
)
from .rff import RffMap, fit_krpd_rff, fit_rff, rff_transform

__version__ = "0.1.0"

__all__ = [
    "DETECTOR_KINDS",
    "DataCloud",
    "DataError",
    "DepthScorer",
    "DirectionSet",
    "EffectiveRankWarning",
    "EvalReport",
    "GramModel",
    "KernelSpec",
    "KnnModel",
    "KpcaModel",
    "NumericalError",
    "RffMap",
    "SearchResult",
    "SearchSpace",
    "SplitPlan",
    "aggregate_reports",
    "centered_gram",
    "cross_gram_centered",
    "depth",
    "evaluate_scores",
    "fit_detector",
    "fit_gram",
    "fit_knn",
    "fit_kpca",
    "fit_krpd",
    "fit_krpd_rff",
    "fit_rff",
    "fit_rpd",
    "flag_outliers",
    "generate_toy",
    "kernel_eval",
    "knn_score",
    "load_csv",
    "load_kpca_model",
    "mad",
    "median",
    "outlier_score",
    "outlyingness",
    "percentile_threshold",
    "random_search",
    "reconstruction_error_score",
    "rff_transform",
    "roc_auc",
    "run_benchmark",
    "sample_directions",
    "save_csv",
    "save_kpca_model",
    "stratified_kfold",
    "stratified_split",
]
