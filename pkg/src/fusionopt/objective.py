"""Fusion objective and evaluation metrics.

The quantity optimizers minimize is the cumulative error on the validation
split: one minus the cumulative accuracy of a candidate weight vector. Two
readings of cumulative accuracy are exposed:

``fused_accuracy``
    Fraction of validation samples whose fused argmax prediction matches
    the label. This is the default everywhere.
``score_mass``
    Mean fused probability assigned to the true class, i.e. the literal
    weighted-sum reading of the accuracy term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DataError
from .fusion import WeightVector, normalize

POSITIVE_CLASS = 1
OBJECTIVE_VARIANTS = ("fused_accuracy", "score_mass")


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion counts with respect to one positive class."""

    tp: int
    fp: int
    fn: int
    tn: int
    positive_class: int = POSITIVE_CLASS

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise DataError(f"confusion count {name} must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: ConfusionCounts


def confusion(predictions, labels, positive_class: int = POSITIVE_CLASS) -> ConfusionCounts:
    """Count tp/fp/fn/tn of ``predictions`` against ``labels``.

    Classes other than ``positive_class`` all count as negative, so the
    counts are one-vs-rest for multi-class data.
    """
    if tuple(predictions.sample_ids) != tuple(labels.sample_ids):
        raise DataError("predictions and labels are not aligned on the same sample_ids")
    pred_pos = predictions.predicted == positive_class
    true_pos = labels.labels == positive_class
    return ConfusionCounts(
        tp=int(np.sum(pred_pos & true_pos)),
        fp=int(np.sum(pred_pos & ~true_pos)),
        fn=int(np.sum(~pred_pos & true_pos)),
        tn=int(np.sum(~pred_pos & ~true_pos)),
        positive_class=positive_class,
    )


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0.0 when both vanish."""
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(counts: ConfusionCounts) -> MetricsReport:
    """Precision, recall, F1, and accuracy from confusion counts.

    Zero denominators yield 0.0 rather than an error so degenerate fusions
    stay comparable.
    """
    total = counts.total
    if total == 0:
        raise DataError("cannot compute metrics over zero samples")
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    accuracy = (counts.tp + counts.tn) / total
    return MetricsReport(precision, recall, f1_score(precision, recall), accuracy, counts)


def _check_variant(variant: str) -> None:
    if variant not in OBJECTIVE_VARIANTS:
        raise ConfigError(
            f"unknown objective variant '{variant}'; expected one of {', '.join(OBJECTIVE_VARIANTS)}"
        )


def cumulative_accuracy(dataset, weights: WeightVector, variant: str = "fused_accuracy") -> float:
    """Quality of a candidate weight vector on the validation split.

    Weights are normalized here, so any positive scaling of the raw vector
    scores identically under ``fused_accuracy``.
    """
    _check_variant(variant)
    if dataset.split != "validation":
        raise DataError(
            f"cumulative accuracy is defined on the validation split, got '{dataset.split}'"
        )
    w = normalize(weights)
    # Inline fusion (same arithmetic as fusion.fuse) keeps this hot path
    # allocation-light; equivalence with fuse/predict is covered by tests.
    fused = (w.values[:, None, None] * dataset.stack).sum(axis=0)
    if variant == "fused_accuracy":
        return float(np.mean(np.argmax(fused, axis=1) == dataset.y))
    return float(np.mean(fused[np.arange(dataset.num_samples), dataset.y]))


def cumulative_error(dataset, weights: WeightVector, variant: str = "fused_accuracy") -> float:
    """One minus the cumulative accuracy; the quantity optimizers minimize."""
    return 1.0 - cumulative_accuracy(dataset, weights, variant)


def make_objective(dataset, variant: str = "fused_accuracy") -> Callable[[np.ndarray], float]:
    """Bind a dataset and variant into a raw-vector objective for optimizers."""
    _check_variant(variant)
    if dataset.split != "validation":
        raise DataError(
            f"objectives are defined on the validation split, got '{dataset.split}'"
        )

    def objective(raw: np.ndarray) -> float:
        return cumulative_error(dataset, WeightVector(raw), variant)

    return objective
