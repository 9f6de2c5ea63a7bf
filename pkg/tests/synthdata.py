"""Seeded dataset builders shared across the suite."""

from __future__ import annotations

import numpy as np

from fusionopt.scoreio import FusionDataset, LabelVector, ScoreMatrix, align


def random_dataset(rng, n_models=3, n_samples=50, n_classes=2,
                   split="validation") -> FusionDataset:
    """Arbitrary valid dataset with random simplex rows."""
    ids = tuple(f"s{i:04d}" for i in range(n_samples))
    labels = rng.integers(0, n_classes, n_samples)
    matrices = []
    for m in range(n_models):
        raw = rng.random((n_samples, n_classes)) + 1e-3
        matrices.append(ScoreMatrix(f"m{m}", ids, raw / raw.sum(axis=1, keepdims=True)))
    return align(matrices, LabelVector(ids, labels), split)


def tiered_dataset(seed, n_samples=200,
                   tiers=((0.82, 0.22), (0.68, 0.26), (0.56, 0.32))) -> FusionDataset:
    """Binary dataset with heterogeneous model quality (strong/mediocre/weak).

    Each model's true-class probability is a clipped Gaussian around its
    tier quality, so the models disagree enough for weight choice to matter.
    """
    rng = np.random.default_rng(seed)
    labels = rng.permutation((np.arange(n_samples) % 2).astype(np.int64))
    ids = tuple(f"s{i:04d}" for i in range(n_samples))
    matrices = []
    for m, (mu, sigma) in enumerate(tiers):
        p_true = np.clip(rng.normal(mu, sigma, n_samples), 0.02, 0.98)
        rows = np.empty((n_samples, 2))
        rows[np.arange(n_samples), labels] = p_true
        rows[np.arange(n_samples), 1 - labels] = 1.0 - p_true
        matrices.append(ScoreMatrix(f"m{m}", ids, rows))
    return align(matrices, LabelVector(ids, labels))


def hand_dataset() -> FusionDataset:
    """Four samples, two models: model m1 is right on s1,s2,s3; m2 on s3,s4.

    Labels are (0, 0, 1, 1), so per-model accuracy is 0.75 and 0.5 and the
    fused values are small enough to check by hand.
    """
    ids = ("s1", "s2", "s3", "s4")
    m1 = ScoreMatrix("m1", ids, np.array(
        [[0.8, 0.2], [0.7, 0.3], [0.4, 0.6], [0.9, 0.1]]))
    m2 = ScoreMatrix("m2", ids, np.array(
        [[0.3, 0.7], [0.2, 0.8], [0.1, 0.9], [0.2, 0.8]]))
    labels = LabelVector(ids, np.array([0, 0, 1, 1]))
    return align([m1, m2], labels)
