"""Exhaustive search over the weight simplex grid.

Candidates are every vector whose entries are nonnegative integer multiples
of the grid step summing to one (parameterized as i/steps to keep the floats
clean), plus the always-appended one-hot vectors and the equal-weights
vector. The grid point with the lowest error wins; equal errors go to the
lexicographically smallest vector.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .common import EvaluationTracker, simplex_grid_size


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def grid_candidates(steps: int, n_models: int, extra_points=()) -> list[np.ndarray]:
    """Deduplicated candidate list: simplex grid, one-hots, equal weights, extras."""
    candidates = [
        np.array(comp, dtype=np.float64) / steps
        for comp in _compositions(steps, n_models)
    ]
    for j in range(n_models):
        one_hot = np.zeros(n_models)
        one_hot[j] = 1.0
        candidates.append(one_hot)
    candidates.append(np.full(n_models, 1.0 / n_models))
    for point in extra_points:
        arr = np.asarray(point, dtype=np.float64)
        if arr.shape != (n_models,):
            raise ConfigError(
                f"extra point of length {arr.size} does not match {n_models} models"
            )
        candidates.append(arr)
    seen: set[tuple[float, ...]] = set()
    unique = []
    for c in candidates:
        key = tuple(c)
        if key not in seen:
            seen.add(key)
            unique.append(c)
    return unique


def run(tracker: EvaluationTracker, n_models: int, steps: int, extra_points=()) -> None:
    # Reject oversized grids before generating the candidate list: the bare
    # grid count already bounds the post-dedup total from below.
    grid_count = simplex_grid_size(steps, n_models)
    if grid_count > tracker.max_evaluations:
        raise ConfigError(
            f"brute-force grid holds {grid_count} points, exceeding the evaluation "
            f"budget of {tracker.max_evaluations}"
        )
    candidates = grid_candidates(steps, n_models, extra_points)
    if len(candidates) > tracker.max_evaluations:
        raise ConfigError(
            f"brute-force candidate set holds {len(candidates)} points, exceeding "
            f"the evaluation budget of {tracker.max_evaluations}"
        )
    for candidate in candidates:
        tracker.evaluate(candidate)
