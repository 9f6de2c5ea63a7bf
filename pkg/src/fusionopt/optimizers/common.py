"""Shared optimizer contract: configuration, result type, evaluation tracking.

Every search method runs over raw vectors in the unit box [0, 1]^M with
normalization happening inside the objective. Raw all-zero candidates are
assigned the worst error 1.0 without being evaluated. Equal errors are
broken toward the lexicographically smallest candidate so parallel and
serial evaluation orders (and reruns) agree bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from ..errors import ConfigError, UsageError
from ..fusion import WeightVector, normalize

METHODS = ("equal", "pso", "ga", "bf", "powell", "nelder-mead")
STOCHASTIC_METHODS = frozenset({"pso", "ga", "powell"})

DEFAULT_MAX_EVALUATIONS = 100_000
DEFAULT_GRID_STEP = 0.05

# Canonical constriction-style settings; the methods themselves come with
# no published hyperparameters for this task.
PSO_DEFAULTS: dict[str, float] = {
    "swarm_size": 30,
    "iterations": 100,
    "inertia": 0.729,
    "cognitive": 1.49445,
    "social": 1.49445,
    "velocity_clamp": 0.5,
}
GA_DEFAULTS: dict[str, float] = {
    "population_size": 50,
    "generations": 100,
    "tournament_size": 3,
    "crossover_prob": 0.9,
    "mutation_prob": 0.1,
    "mutation_sigma": 0.1,
    "elitism": 2,
    "stall_window": 20,
}
POWELL_DEFAULTS: dict[str, float] = {
    "restarts": 5,
    "line_tolerance": 1e-6,
    "outer_tolerance": 1e-8,
    "max_outer_iterations": 100,
}
NELDER_MEAD_DEFAULTS: dict[str, float] = {
    "reflection": 1.0,
    "expansion": 2.0,
    "contraction": 0.5,
    "shrink": 0.5,
    "initial_offset": 0.1,
    "spread_tolerance": 1e-6,
    "max_iterations": 200,
}

_METHOD_DEFAULTS: dict[str, dict[str, float]] = {
    "equal": {},
    "bf": {},
    "pso": PSO_DEFAULTS,
    "ga": GA_DEFAULTS,
    "powell": POWELL_DEFAULTS,
    "nelder-mead": NELDER_MEAD_DEFAULTS,
}

_INT_PARAMS = {
    "swarm_size", "iterations", "population_size", "generations",
    "tournament_size", "elitism", "stall_window", "restarts",
    "max_outer_iterations", "max_iterations",
}


def rng_stream(seed: int, *site: int) -> np.random.Generator:
    """Counter-based generator for a named draw site.

    Each (seed, site) pair yields an independent stream, so the draw order
    inside one site can never be perturbed by how other sites are consumed.
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=site))
    )


def _as_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"parameter '{name}' must be an integer")
    if isinstance(value, float):
        if not value.is_integer():
            raise ConfigError(f"parameter '{name}' must be an integer, got {value!r}")
        value = int(value)
    if not isinstance(value, int):
        raise ConfigError(f"parameter '{name}' must be an integer, got {value!r}")
    return value


def _validate_params(method: str, params: dict[str, float]) -> dict[str, float]:
    checks: list[tuple[str, bool, str]] = []
    if method == "pso":
        checks = [
            ("swarm_size", params["swarm_size"] >= 2, "swarm_size must be at least 2"),
            ("iterations", params["iterations"] >= 1, "iterations must be at least 1"),
            ("inertia", 0.0 <= params["inertia"] < 1.0, "inertia must lie in [0, 1)"),
            ("cognitive", params["cognitive"] >= 0.0, "cognitive must be nonnegative"),
            ("social", params["social"] >= 0.0, "social must be nonnegative"),
            ("velocity_clamp", params["velocity_clamp"] > 0.0, "velocity_clamp must be positive"),
        ]
    elif method == "ga":
        checks = [
            ("population_size", params["population_size"] >= 4,
             "population_size must be at least 4"),
            ("generations", params["generations"] >= 1, "generations must be at least 1"),
            ("tournament_size", 1 <= params["tournament_size"] <= params["population_size"],
             "tournament_size must lie in [1, population_size]"),
            ("crossover_prob", 0.0 <= params["crossover_prob"] <= 1.0,
             "crossover_prob must lie in [0, 1]"),
            ("mutation_prob", 0.0 <= params["mutation_prob"] <= 1.0,
             "mutation_prob must lie in [0, 1]"),
            ("mutation_sigma", params["mutation_sigma"] > 0.0, "mutation_sigma must be positive"),
            ("elitism", 0 <= params["elitism"] < params["population_size"],
             "elitism must lie in [0, population_size)"),
            ("stall_window", params["stall_window"] >= 1, "stall_window must be at least 1"),
        ]
    elif method == "powell":
        checks = [
            ("restarts", params["restarts"] >= 1, "restarts must be at least 1"),
            ("line_tolerance", params["line_tolerance"] > 0.0, "line_tolerance must be positive"),
            ("outer_tolerance", params["outer_tolerance"] > 0.0, "outer_tolerance must be positive"),
            ("max_outer_iterations", params["max_outer_iterations"] >= 1,
             "max_outer_iterations must be at least 1"),
        ]
    elif method == "nelder-mead":
        checks = [
            ("reflection", params["reflection"] > 0.0, "reflection must be positive"),
            ("expansion", params["expansion"] > 1.0, "expansion must exceed 1"),
            ("contraction", 0.0 < params["contraction"] < 1.0, "contraction must lie in (0, 1)"),
            ("shrink", 0.0 < params["shrink"] < 1.0, "shrink must lie in (0, 1)"),
            ("initial_offset", 0.0 < params["initial_offset"] < 1.0,
             "initial_offset must lie in (0, 1)"),
            ("spread_tolerance", params["spread_tolerance"] > 0.0,
             "spread_tolerance must be positive"),
            ("max_iterations", params["max_iterations"] >= 1, "max_iterations must be at least 1"),
        ]
    for _, ok, message in checks:
        if not ok:
            raise ConfigError(f"method '{method}': {message}")
    return params


@dataclass(frozen=True)
class OptimizerConfig:
    """Method name plus everything needed to rerun a search bit-identically."""

    method: str
    seed: int | None = None
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
    grid_step: float = DEFAULT_GRID_STEP
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(
                f"unknown method '{self.method}'; expected one of {', '.join(METHODS)}"
            )
        if self.seed is not None:
            if isinstance(self.seed, bool) or not isinstance(self.seed, int):
                raise ConfigError("seed must be an unsigned 64-bit integer")
            if not 0 <= self.seed < 2 ** 64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.method in STOCHASTIC_METHODS and self.seed is None:
            raise UsageError(
                f"method '{self.method}' is stochastic and requires an explicit seed"
            )
        if not isinstance(self.max_evaluations, int) or self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be a positive integer")
        if not (isinstance(self.grid_step, (int, float)) and 0.0 < self.grid_step <= 1.0):
            raise ConfigError(f"grid_step must lie in (0, 1], got {self.grid_step!r}")
        if self.method == "bf":
            steps = round(1.0 / self.grid_step)
            if steps < 1 or abs(steps * self.grid_step - 1.0) > 1e-9:
                raise ConfigError(
                    f"grid_step {self.grid_step!r} must divide 1 into a whole number of steps"
                )
        defaults = _METHOD_DEFAULTS[self.method]
        unknown = sorted(set(self.params) - set(defaults))
        if unknown:
            raise ConfigError(
                f"method '{self.method}' does not accept parameter(s): {', '.join(unknown)}"
            )
        merged = dict(defaults)
        for key, value in self.params.items():
            merged[key] = _as_int(value, key) if key in _INT_PARAMS else float(value)
        _validate_params(self.method, merged)
        object.__setattr__(self, "params", dict(self.params))

    def resolved(self) -> dict[str, float]:
        """Defaults overlaid with this config's overrides."""
        merged = dict(_METHOD_DEFAULTS[self.method])
        for key, value in self.params.items():
            merged[key] = _as_int(value, key) if key in _INT_PARAMS else float(value)
        return merged

    def grid_steps(self) -> int:
        return round(1.0 / self.grid_step)


@dataclass(frozen=True, eq=False)
class OptResult:
    """Outcome of one search: best weights, best error, and the search trace.

    ``trace`` holds (evaluation index, best-so-far error) pairs recorded at
    every improvement, so the error column is non-increasing by construction.
    """

    method: str
    seed: int | None
    best_weights: WeightVector
    best_error: float
    evaluations: int
    trace: tuple[tuple[int, float], ...]


def result_to_dict(result: OptResult) -> dict:
    return {
        "method": result.method,
        "seed": result.seed,
        "best_error": float(result.best_error),
        "best_weights": [float(w) for w in result.best_weights.values],
        "evaluations": int(result.evaluations),
        "trace": [[int(i), float(e)] for i, e in result.trace],
    }


def result_to_json(result: OptResult) -> str:
    return json.dumps(result_to_dict(result), indent=2) + "\n"


def write_result_json(result: OptResult, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result_to_json(result), encoding="utf-8")


def write_trace_csv(result: OptResult, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["evaluation,best_error"]
    lines += [f"{i},{repr(float(e))}" for i, e in result.trace]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class BudgetExhausted(Exception):
    """Internal control flow: the evaluation budget is used up."""


class EvaluationTracker:
    """Counts evaluations and keeps the lexicographic best-so-far candidate.

    All candidate assessments flow through :meth:`evaluate`, including the
    all-zero shortcut, so the budget bound and the improvement trace hold
    uniformly across methods.
    """

    def __init__(self, objective: Callable[[np.ndarray], float], max_evaluations: int):
        self._objective = objective
        self.max_evaluations = max_evaluations
        self.evaluations = 0
        self.best_error: float | None = None
        self.best_raw: np.ndarray | None = None
        self.trace: list[tuple[int, float]] = []

    def evaluate(self, candidate) -> float:
        if self.evaluations >= self.max_evaluations:
            raise BudgetExhausted
        self.evaluations += 1
        raw = np.asarray(candidate, dtype=np.float64)
        if not np.any(raw > 0.0):
            return 1.0  # worst by fiat; never evaluated, never the best
        error = float(self._objective(raw))
        if self.best_error is None or error < self.best_error:
            self.best_error = error
            self.best_raw = raw.copy()
            self.trace.append((self.evaluations, error))
        elif error == self.best_error and tuple(raw) < tuple(self.best_raw):
            self.best_raw = raw.copy()
        return error

    def result(self, method: str, seed: int | None) -> OptResult:
        if self.best_raw is None:
            raise ConfigError(
                f"method '{method}' finished without evaluating any feasible candidate"
            )
        return OptResult(
            method=method,
            seed=seed,
            best_weights=normalize(WeightVector(self.best_raw)),
            best_error=self.best_error,
            evaluations=self.evaluations,
            trace=tuple(self.trace),
        )


def lexicographic_better(error: float, candidate: np.ndarray,
                         best_error: float, best: np.ndarray) -> bool:
    """Shared tie rule: lower error wins, equal errors go to the smaller vector."""
    if error < best_error:
        return True
    return error == best_error and tuple(candidate) < tuple(best)


def simplex_grid_size(steps: int, n_models: int) -> int:
    """Number of grid points with entries i/steps summing to 1 (stars and bars)."""
    return math.comb(steps + n_models - 1, n_models - 1)
