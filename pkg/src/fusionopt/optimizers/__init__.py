"""Derivative-free weight-search methods behind one contract.

Every method searches raw vectors in [0, 1]^M, scores candidates through a
shared tracker (budget, all-zero rule, lexicographic tie-break, improvement
trace), and returns an :class:`OptResult` whose weights are normalized.
Identical configurations, seed included, reproduce results bit-identically.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from . import brute_force as _brute_force
from . import genetic as _genetic
from . import nelder_mead as _nelder_mead
from . import powell as _powell
from . import pso as _pso
from .common import (
    DEFAULT_GRID_STEP,
    DEFAULT_MAX_EVALUATIONS,
    METHODS,
    STOCHASTIC_METHODS,
    BudgetExhausted,
    EvaluationTracker,
    OptimizerConfig,
    OptResult,
    result_to_dict,
    result_to_json,
    rng_stream,
    simplex_grid_size,
    write_result_json,
    write_trace_csv,
)

__all__ = [
    "METHODS", "STOCHASTIC_METHODS", "DEFAULT_GRID_STEP", "DEFAULT_MAX_EVALUATIONS",
    "OptimizerConfig", "OptResult", "optimize",
    "brute_force", "pso", "genetic", "powell", "nelder_mead",
    "result_to_dict", "result_to_json", "write_result_json", "write_trace_csv",
    "rng_stream", "simplex_grid_size", "EvaluationTracker", "BudgetExhausted",
]


def optimize(objective, n_models: int, config: OptimizerConfig) -> OptResult:
    """Run the configured method on ``objective`` over M raw weights.

    ``objective`` maps a raw nonnegative weight vector to an error in [0, 1]
    and must normalize internally (see :func:`fusionopt.objective.make_objective`).
    """
    if n_models < 1:
        raise ConfigError("need at least one model to optimize over")
    tracker = EvaluationTracker(objective, config.max_evaluations)
    params = config.resolved()
    try:
        if config.method == "equal":
            tracker.evaluate(np.full(n_models, 1.0 / n_models))
        elif config.method == "bf":
            _brute_force.run(tracker, n_models, config.grid_steps())
        elif config.method == "pso":
            _pso.run(tracker, n_models, config.seed, params)
        elif config.method == "ga":
            _genetic.run(tracker, n_models, config.seed, params)
        elif config.method == "powell":
            _powell.run(tracker, n_models, config.seed, params)
        else:  # nelder-mead; config validation rejects anything else
            _nelder_mead.run(tracker, n_models, params)
    except BudgetExhausted:
        pass
    return tracker.result(config.method, config.seed)


def _require_method(config: OptimizerConfig, method: str) -> None:
    if config.method != method:
        raise ConfigError(f"config is for method '{config.method}', expected '{method}'")


def brute_force(objective, n_models: int, grid_step: float = DEFAULT_GRID_STEP,
                extra_points=(), max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> OptResult:
    """Exhaustive grid search; ``extra_points`` join the candidate set."""
    config = OptimizerConfig(method="bf", grid_step=grid_step, max_evaluations=max_evaluations)
    if n_models < 1:
        raise ConfigError("need at least one model to optimize over")
    tracker = EvaluationTracker(objective, config.max_evaluations)
    try:
        _brute_force.run(tracker, n_models, config.grid_steps(), extra_points)
    except BudgetExhausted:
        pass
    return tracker.result("bf", None)


def pso(objective, n_models: int, config: OptimizerConfig) -> OptResult:
    _require_method(config, "pso")
    return optimize(objective, n_models, config)


def genetic(objective, n_models: int, config: OptimizerConfig) -> OptResult:
    _require_method(config, "ga")
    return optimize(objective, n_models, config)


def powell(objective, n_models: int, config: OptimizerConfig) -> OptResult:
    _require_method(config, "powell")
    return optimize(objective, n_models, config)


def nelder_mead(objective, n_models: int, config: OptimizerConfig) -> OptResult:
    _require_method(config, "nelder-mead")
    return optimize(objective, n_models, config)
