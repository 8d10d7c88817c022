"""Run the full evaluation protocol at a small budget: stratified 60/40
splits, cross-validated random hyperparameter search, held-out ROC AUC,
and the with/without-principal-components ablation of the kernel scorer.

Takes a couple of minutes.  Run from the repository root:

    python3 demos/03_benchmark_and_ablation.py
"""

from projdepth import generate_toy, run_benchmark

TRIALS = 3
BUDGET = 10


def show(cells):
    for cell in cells:
        if cell.error:
            print(f"  {cell.dataset:10s} {cell.detector:8s} failed: {cell.error}")
            continue
        report = cell.report
        params = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in sorted(cell.params.items()))
        print(f"  {cell.dataset:10s} {cell.detector:8s} AUC {report.auc_mean:.3f} +/- {report.auc_std:.3f}"
              f"   [{params or 'no hyperparameters'}]  {cell.seconds:.1f}s")


def main():
    datasets = [(kind, generate_toy(kind, seed=21)) for kind in
                ("unimodal", "multimodal", "cross", "moons")]

    print(f"benchmark: {TRIALS} trials, search budget {BUDGET}, L=1000 directions\n")
    cells = run_benchmark(datasets, ["rpd", "krpd", "knn"], trials=TRIALS, budget=BUDGET, seed=1)
    show(cells)

    print("\nkernel scorer with vs without the principal-component step (RFF ablation):\n")
    ablation = run_benchmark(
        [d for d in datasets if d[0] in ("multimodal", "moons")],
        ["krpd", "krpd-rff"],
        trials=TRIALS,
        budget=BUDGET,
        seed=1,
    )
    show(ablation)


if __name__ == "__main__":
    main()
