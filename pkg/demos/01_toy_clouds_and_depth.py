"""Walk through the four synthetic clouds and score them with plain and
kernelized projection depth.

For each cloud we fit both detectors on the full (contaminated) sample,
threshold scores at the true outlier fraction, and report how well the
flagged set matches the labels.  With matplotlib installed the script also
writes contour plots of the decision landscape to ``demos/output/``.

Run from the repository root:

    python3 demos/01_toy_clouds_and_depth.py
"""

from pathlib import Path

import numpy as np

from projdepth import (
    KernelSpec,
    fit_krpd,
    fit_rpd,
    flag_outliers,
    generate_toy,
    percentile_threshold,
    roc_auc,
)

GAMMA = 0.25        # figure-quality defaults for the toy clouds
COMPONENTS = 100
DIRECTIONS = 1000
CONTAMINATION = 0.25  # 100 of 400 samples are outliers

OUTPUT_DIR = Path(__file__).parent / "output"


def describe(name, scorer, cloud):
    scores = scorer.outlier_score(cloud.features)
    threshold = percentile_threshold(scores, CONTAMINATION)
    flagged = flag_outliers(scores, threshold)
    caught = int((flagged & (cloud.labels == 1)).sum())
    false_alarms = int((flagged & (cloud.labels == 0)).sum())
    auc = roc_auc(scores, cloud.labels)
    print(
        f"  {name:5s} AUC {auc:.3f} | threshold {threshold:+.4f} | "
        f"flagged {int(flagged.sum()):3d} points: {caught} true outliers, {false_alarms} inliers"
    )
    return scores, threshold


def maybe_plot(kind, cloud, scorers):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    OUTPUT_DIR.mkdir(exist_ok=True)
    xs = np.linspace(-6, 6, 150)
    grid_x, grid_y = np.meshgrid(xs, xs)
    points = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    fig, axes = plt.subplots(1, len(scorers), figsize=(6 * len(scorers), 5))
    for ax, (name, scorer, threshold) in zip(np.atleast_1d(axes), scorers):
        landscape = scorer.outlier_score(points).reshape(grid_x.shape)
        ax.contourf(grid_x, grid_y, landscape, levels=20, cmap="viridis")
        ax.contour(grid_x, grid_y, landscape, levels=[threshold], colors="red", linestyles="dotted")
        inliers = cloud.features[cloud.labels == 0]
        outliers = cloud.features[cloud.labels == 1]
        ax.plot(inliers[:, 0], inliers[:, 1], ".", color="white", markersize=3)
        ax.plot(outliers[:, 0], outliers[:, 1], "x", color="orange", markersize=4)
        ax.set_title(f"{kind}: {name}")
    path = OUTPUT_DIR / f"{kind}_contours.png"
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    print(f"  contour plot -> {path}")


def main():
    for kind in ("unimodal", "multimodal", "cross", "moons"):
        print(f"\n{kind} (400 samples, 100 uniform outliers on the [-6, 6] box)")
        cloud = generate_toy(kind, seed=7)
        rpd = fit_rpd(cloud, DIRECTIONS, seed=1)
        _, rpd_threshold = describe("RPD", rpd, cloud)
        krpd = fit_krpd(cloud, KernelSpec("rbf", GAMMA), COMPONENTS, DIRECTIONS, seed=1)
        _, krpd_threshold = describe("KRPD", krpd, cloud)
        maybe_plot(kind, cloud, [("RPD", rpd, rpd_threshold), ("KRPD", krpd, krpd_threshold)])


if __name__ == "__main__":
    main()
