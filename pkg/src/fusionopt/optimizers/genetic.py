"""Generational genetic algorithm with real-valued genes.

Tournament selection, uniform crossover, per-gene Gaussian mutation clamped
to the unit box, and elitism. Terminates at the generation cap or once the
best error has not improved for a stall window. Every generation draws all
of its randomness from one counter-based stream before any child is
evaluated.
"""

from __future__ import annotations

import numpy as np

from .common import EvaluationTracker, rng_stream

_SITE_INIT = 0
_SITE_GENERATION_BASE = 1


def _tournament(rng, population, errors, size: int) -> np.ndarray:
    contenders = rng.integers(0, len(population), size=size)
    winner = min(contenders, key=lambda i: (errors[i], tuple(population[i])))
    return population[winner].copy()


def run(tracker: EvaluationTracker, n_models: int, seed: int, params: dict) -> None:
    pop_size = int(params["population_size"])
    generations = int(params["generations"])
    tournament_size = int(params["tournament_size"])
    crossover_prob = params["crossover_prob"]
    mutation_prob = params["mutation_prob"]
    sigma = params["mutation_sigma"]
    elitism = int(params["elitism"])
    stall_window = int(params["stall_window"])

    population = rng_stream(seed, _SITE_INIT).uniform(size=(pop_size, n_models))
    errors = np.array([tracker.evaluate(x) for x in population])

    best_seen = float(errors.min())
    stalled = 0
    for generation in range(generations):
        rng = rng_stream(seed, _SITE_GENERATION_BASE + generation)
        ranked = sorted(range(pop_size), key=lambda i: (errors[i], tuple(population[i])))
        elites = [population[i].copy() for i in ranked[:elitism]]
        elite_errors = [float(errors[i]) for i in ranked[:elitism]]

        children: list[np.ndarray] = []
        while len(children) < pop_size - elitism:
            parent_a = _tournament(rng, population, errors, tournament_size)
            parent_b = _tournament(rng, population, errors, tournament_size)
            if rng.random() < crossover_prob:
                mask = rng.random(n_models) < 0.5
                child_a = np.where(mask, parent_a, parent_b)
                child_b = np.where(mask, parent_b, parent_a)
            else:
                child_a, child_b = parent_a, parent_b
            for child in (child_a, child_b):
                mutate = rng.random(n_models) < mutation_prob
                noise = rng.normal(0.0, sigma, n_models)
                mutated = np.where(mutate, np.clip(child + noise, 0.0, 1.0), child)
                children.append(mutated)
        children = children[: pop_size - elitism]

        child_errors = [tracker.evaluate(child) for child in children]
        population = np.array(elites + children)
        errors = np.array(elite_errors + child_errors)

        generation_best = float(errors.min())
        if generation_best < best_seen:
            best_seen = generation_best
            stalled = 0
        else:
            stalled += 1
        if stalled >= stall_window:
            break
