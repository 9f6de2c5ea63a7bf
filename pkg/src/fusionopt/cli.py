"""Batch experiment runner.

Commands
--------
evaluate   per-model metrics for one or more score files
fuse       combine score files under explicit weights, write fused CSV
optimize   run one configured weight search from a manifest
compare    run the six-method comparison from a manifest
prep       clean / balance / augment a JSONL sample file

Exit codes: 0 success, 1 domain error (validation or optimizer failure),
2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import FusionOptError, InvalidWeightsError, UsageError
from .fusion import WeightVector, equal_weights, fuse, normalize, predict
from .objective import confusion, make_objective, metrics
from .optimizers import OptimizerConfig, optimize, write_result_json
from .scoreio import (
    ReportRow,
    ScoreMatrix,
    align,
    load_labels,
    load_manifest,
    load_manifest_splits,
    load_scores,
    write_report,
    write_scores,
)
from .textprep import (
    augment_backtranslate,
    clean_text,
    identity_translator,
    read_samples,
    upsample,
    write_samples,
)

COMPARISON_ORDER = ("equal", "pso", "ga", "bf", "powell", "nelder-mead")

# A comparison row is a report row whose weights were chosen on the
# validation split and whose metrics come from the test split.
ComparisonRow = ReportRow


def _search_and_score(validation, test, method, params, seed, grid_step, variant):
    """Choose weights on the validation split, then score the test split."""
    config = OptimizerConfig(
        method=method, seed=seed, grid_step=grid_step, params=params
    )
    objective = make_objective(validation, variant)
    result = optimize(objective, validation.num_models, config)
    predictions = predict(fuse(test, result.best_weights))
    report = metrics(confusion(predictions, test.labels))
    row = ReportRow.from_metrics(
        method, report,
        objective=result.best_error,
        weights=result.best_weights.values,
    )
    return result, row


def _print_row(row: ReportRow) -> None:
    line = (
        f"{row.method}: precision={row.precision:.6f} recall={row.recall:.6f} "
        f"f1={row.f1:.6f} accuracy={row.accuracy:.6f}"
    )
    if row.objective is not None:
        line += f" objective={row.objective:.6f}"
    if row.weights is not None:
        line += " weights=" + ";".join(f"{w:.6f}" for w in row.weights)
    print(line)


def cmd_evaluate(args) -> int:
    labels = load_labels(args.labels)
    rows = []
    for scores_path in args.scores:
        matrix = load_scores(scores_path)
        dataset = align([matrix], labels)
        predictions = predict(fuse(dataset, equal_weights(1)))
        report = metrics(confusion(predictions, dataset.labels))
        rows.append(ReportRow.from_metrics(matrix.model_id, report))
    for row in rows:
        _print_row(row)
    if args.out:
        write_report(rows, args.out)
    return 0


def _parse_weights(text: str) -> WeightVector:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"could not parse --weights value {text!r}") from None
    return WeightVector(np.array(values))


def cmd_fuse(args) -> int:
    labels = load_labels(args.labels)
    matrices = [load_scores(p) for p in args.scores]
    dataset = align(matrices, labels)
    weights = normalize(_parse_weights(args.weights))
    if len(weights) != dataset.num_models:
        raise InvalidWeightsError(
            f"got {len(weights)} weights for {dataset.num_models} score files"
        )
    fused = fuse(dataset, weights)
    write_scores(ScoreMatrix("fused", fused.sample_ids, fused.fused), args.out)
    print(f"wrote fused scores for {dataset.num_samples} samples to {args.out}")
    return 0


def cmd_optimize(args) -> int:
    manifest = load_manifest(args.manifest)
    method = args.method or manifest.method
    seed = args.seed if args.seed is not None else manifest.seed
    grid_step = args.grid_step if args.grid_step is not None else manifest.grid_step
    variant = args.objective or manifest.objective
    out = Path(args.out) if args.out else manifest.output
    validation, test = load_manifest_splits(manifest)
    params = manifest.params if method == manifest.method else {}
    result, row = _search_and_score(
        validation, test, method, params, seed, grid_step, variant
    )
    _print_row(row)
    write_report([row], out)
    write_result_json(result, out.with_suffix(".json"))
    return 0


def cmd_compare(args) -> int:
    manifest = load_manifest(args.manifest)
    seed = args.seed if args.seed is not None else manifest.seed
    out = Path(args.out) if args.out else manifest.output
    validation, test = load_manifest_splits(manifest)
    rows = []
    for method in COMPARISON_ORDER:
        params = manifest.params if method == manifest.method else {}
        try:
            _, row = _search_and_score(
                validation, test, method, params, seed,
                manifest.grid_step, manifest.objective,
            )
        except FusionOptError as exc:
            raise type(exc)(f"method '{method}': {exc}") from exc
        rows.append(row)
        _print_row(row)
    write_report(rows, out)
    return 0


def cmd_prep(args) -> int:
    samples = read_samples(args.input)
    if args.prep_command == "clean":
        out = [replace(s, text=clean_text(s.text)) for s in samples]
    elif args.prep_command == "balance":
        out = upsample(samples, args.seed)
    else:  # augment
        out = augment_backtranslate(
            samples, identity_translator, args.source_lang, args.target_lang
        )
    write_samples(out, args.out)
    print(f"wrote {len(out)} samples to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusionopt",
        description="Late-fusion score combination and weight search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="per-model metrics for score files")
    p_eval.add_argument("--scores", action="append", required=True,
                        help="score CSV (repeat for several models)")
    p_eval.add_argument("--labels", required=True)
    p_eval.add_argument("--out", help="optional report CSV path")
    p_eval.set_defaults(func=cmd_evaluate)

    p_fuse = sub.add_parser("fuse", help="fuse score files under explicit weights")
    p_fuse.add_argument("--scores", action="append", required=True)
    p_fuse.add_argument("--labels", required=True)
    p_fuse.add_argument("--weights", required=True, help="comma-separated raw weights")
    p_fuse.add_argument("--out", required=True)
    p_fuse.set_defaults(func=cmd_fuse)

    p_opt = sub.add_parser("optimize", help="run one weight search from a manifest")
    p_opt.add_argument("--manifest", required=True)
    p_opt.add_argument("--method", help="override the manifest method")
    p_opt.add_argument("--seed", type=int, help="override the manifest seed")
    p_opt.add_argument("--grid-step", type=float, dest="grid_step")
    p_opt.add_argument("--objective", choices=("fused_accuracy", "score_mass"))
    p_opt.add_argument("--out", help="override the manifest output path")
    p_opt.set_defaults(func=cmd_optimize)

    p_cmp = sub.add_parser("compare", help="run the six-method comparison")
    p_cmp.add_argument("--manifest", required=True)
    p_cmp.add_argument("--seed", type=int, help="override the manifest seed")
    p_cmp.add_argument("--out", help="override the manifest output path")
    p_cmp.set_defaults(func=cmd_compare)

    p_prep = sub.add_parser("prep", help="text preprocessing on JSONL samples")
    prep_sub = p_prep.add_subparsers(dest="prep_command", required=True)
    for name, description in (
        ("clean", "clean every text"),
        ("balance", "upsample minority classes"),
        ("augment", "append translated source-language samples"),
    ):
        p = prep_sub.add_parser(name, help=description)
        p.add_argument("input", help="input JSONL path")
        p.add_argument("--out", required=True, help="output JSONL path")
        if name == "balance":
            p.add_argument("--seed", type=int, required=True)
        if name == "augment":
            p.add_argument("--source-lang", default="it", dest="source_lang")
            p.add_argument("--target-lang", default="en", dest="target_lang")
        p.set_defaults(func=cmd_prep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FusionOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())
