"""Run the six-method fusion comparison described by a manifest.

Chooses weights on the validation split with every method (equal-weights
baseline, PSO, GA, brute force, direction-set, downhill simplex), scores
the held-out test split at those weights, and writes:

  <out>/comparison.csv          one row per method
  <out>/<method>.result.json    full search outcome per method
  <out>/<method>.trace.csv      best-so-far error trace per method

Usage:  python scripts/run_comparison.py --manifest data/synthetic/manifest.json \
            --out results/ [--seed 42]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from fusionopt.cli import COMPARISON_ORDER
from fusionopt.fusion import fuse, predict
from fusionopt.objective import confusion, make_objective, metrics
from fusionopt.optimizers import (
    OptimizerConfig,
    optimize,
    write_result_json,
    write_trace_csv,
)
from fusionopt.scoreio import ReportRow, load_manifest, load_manifest_splits, write_report


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--manifest", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--seed", type=int, help="override the manifest seed")
    args = parser.parse_args()

    manifest = load_manifest(args.manifest)
    seed = args.seed if args.seed is not None else manifest.seed
    validation, test = load_manifest_splits(manifest)
    objective = make_objective(validation, manifest.objective)

    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for method in COMPARISON_ORDER:
        config = OptimizerConfig(
            method=method,
            seed=seed,
            grid_step=manifest.grid_step,
            params=manifest.params if method == manifest.method else {},
        )
        result = optimize(objective, validation.num_models, config)
        predictions = predict(fuse(test, result.best_weights))
        report = metrics(confusion(predictions, test.labels))
        rows.append(ReportRow.from_metrics(
            method, report,
            objective=result.best_error,
            weights=result.best_weights.values,
        ))
        write_result_json(result, args.out / f"{method}.result.json")
        write_trace_csv(result, args.out / f"{method}.trace.csv")
        print(f"{method:12s} validation error {result.best_error:.6f} "
              f"({result.evaluations} evaluations), test f1 {report.f1:.6f}")

    write_report(rows, args.out / "comparison.csv")
    print(f"\nwrote {args.out / 'comparison.csv'}")


if __name__ == "__main__":
    main()
