"""Weighted late fusion of per-model classification scores.

Fused scores are the per-class linear combination of the individual model
scores under a normalized weight vector; predictions take the argmax with
ties broken toward the lowest class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWeightsError

FUSED_ROW_SUM_TOLERANCE = 1e-9


def exact_simplex(values) -> np.ndarray:
    """Scale a nonnegative vector so ``math.fsum`` of the result is exactly 1.0.

    Plain division leaves the compensated sum an ulp or two away from one,
    which would make repeated normalization (or a save/load cycle) drift.
    After dividing by the total, the largest coordinate is nudged onto the
    exact residual, which makes this function a bitwise fixed point:
    ``exact_simplex(exact_simplex(x))`` returns ``exact_simplex(x)`` unchanged.
    """
    vals = [float(v) for v in values]
    total = math.fsum(vals)
    if not math.isfinite(total) or total <= 0.0:
        raise InvalidWeightsError(f"cannot normalize vector with sum {total!r}")
    if total == 1.0:
        return np.asarray(vals, dtype=np.float64)
    scaled = [v / total for v in vals]
    for j in sorted(range(len(scaled)), key=lambda i: (-scaled[i], i)):
        rest = math.fsum(scaled[:j] + scaled[j + 1:])
        nudged = 1.0 - rest
        if nudged >= 0.0:
            scaled[j] = nudged
        if math.fsum(scaled) == 1.0:
            break
    return np.asarray(scaled, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-model fusion weights; raw vectors may be unnormalized.

    Entries must be finite and nonnegative with at least one strictly
    positive. All-zero vectors are rejected here; optimizers screen raw
    all-zero candidates before ever constructing a WeightVector.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidWeightsError("weights must form a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise InvalidWeightsError("weights contain non-finite entries")
        if np.any(arr < 0.0):
            raise InvalidWeightsError("weights contain negative entries")
        if not np.any(arr > 0.0):
            raise InvalidWeightsError("weights are all zero")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True, eq=False)
class FusedScores:
    """Samples-by-classes table of fused scores."""

    sample_ids: tuple[str, ...]
    fused: np.ndarray

    def __post_init__(self):
        arr = np.array(self.fused, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise InvalidWeightsError("fused scores must be a 2-D table")
        if len(self.sample_ids) != arr.shape[0]:
            raise InvalidWeightsError(
                f"{len(self.sample_ids)} sample ids for {arr.shape[0]} fused rows"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidWeightsError("fused scores contain non-finite entries")
        sums = arr.sum(axis=1)
        off = np.abs(sums - 1.0)
        if np.any(off > FUSED_ROW_SUM_TOLERANCE):
            i = int(np.argmax(off))
            raise InvalidWeightsError(
                f"fused row {i} sums to {sums[i]!r}; convex combinations must stay on the simplex"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "fused", arr)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

    @property
    def num_classes(self) -> int:
        return int(self.fused.shape[1])


@dataclass(frozen=True, eq=False)
class Predictions:
    """Predicted class index per sample."""

    sample_ids: tuple[str, ...]
    predicted: np.ndarray

    def __post_init__(self):
        arr = np.array(self.predicted, dtype=np.int64, copy=True)
        if arr.ndim != 1 or arr.size != len(self.sample_ids):
            raise InvalidWeightsError("predictions must be one class index per sample")
        if arr.size and arr.min() < 0:
            raise InvalidWeightsError("negative class index in predictions")
        arr.setflags(write=False)
        object.__setattr__(self, "predicted", arr)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))


def normalize(raw: WeightVector) -> WeightVector:
    """Rescale weights onto the unit simplex.

    Uses :func:`exact_simplex`, so normalizing an already normalized vector
    returns it bit-identically and the fused argmax is unaffected.
    """
    return WeightVector(exact_simplex(raw.values))


def equal_weights(n_models: int) -> WeightVector:
    """The naive baseline: every model weighted 1/N."""
    if n_models < 1:
        raise InvalidWeightsError("need at least one model for equal weights")
    return WeightVector(np.full(n_models, 1.0 / n_models))


def fuse(dataset, weights: WeightVector) -> FusedScores:
    """Linear combination of the models' score tables under ``weights``.

    ``fused[i][k] = sum_n weights[n] * scores_n[i][k]``. Expects normalized
    weights; a unit weight on one model reproduces that model's table
    bit-identically.
    """
    if len(weights) != dataset.num_models:
        raise InvalidWeightsError(
            f"got {len(weights)} weights for {dataset.num_models} models"
        )
    total = math.fsum(float(v) for v in weights.values)
    if abs(total - 1.0) > 1e-9:
        raise InvalidWeightsError(
            f"fuse expects normalized weights; got sum {total!r}"
        )
    fused = (weights.values[:, None, None] * dataset.stack).sum(axis=0)
    return FusedScores(dataset.sample_ids, fused)


def predict(fused_scores: FusedScores) -> Predictions:
    """Argmax decision rule; ties go to the lowest class index."""
    return Predictions(
        fused_scores.sample_ids, np.argmax(fused_scores.fused, axis=1)
    )
