import itertools
import math

import numpy as np
import pytest

from fusionopt.errors import ConfigError, UsageError
from fusionopt.fusion import WeightVector, exact_simplex
from fusionopt.objective import cumulative_error, make_objective
from fusionopt.optimizers import (
    METHODS,
    OptimizerConfig,
    brute_force,
    genetic,
    nelder_mead,
    optimize,
    powell,
    pso,
    result_to_json,
    simplex_grid_size,
    write_trace_csv,
)
from fusionopt.optimizers.common import EvaluationTracker
from fusionopt.optimizers.nelder_mead import run as nm_run

from synthdata import hand_dataset, random_dataset, tiered_dataset


def v_landscape(raw):
    """Analytic test landscape with its unique simplex optimum at (0.7, 0.3)."""
    w = exact_simplex(np.asarray(raw, dtype=np.float64))
    return abs(w[0] - 0.7) + abs(w[1] - 0.3)


def quadratic_bowl(center):
    center = np.asarray(center, dtype=np.float64)

    def objective(raw):
        x = np.asarray(raw, dtype=np.float64)
        return float(np.sum((x - center) ** 2))

    return objective


def oracle_brute_force(objective, n_models, steps):
    """Independent enumeration of the brute-force candidate set.

    Built from itertools rather than the package's composition generator;
    returns the (error, raw weights) pair under the lexicographic tie rule.
    """
    candidates = []
    for combo in itertools.product(range(steps + 1), repeat=n_models):
        if sum(combo) == steps:
            candidates.append(np.array(combo, dtype=np.float64) / steps)
    for j in range(n_models):
        one_hot = np.zeros(n_models)
        one_hot[j] = 1.0
        candidates.append(one_hot)
    candidates.append(np.full(n_models, 1.0 / n_models))
    best = None
    for cand in candidates:
        key = (float(objective(cand)), tuple(cand))
        if best is None or key < best:
            best = key
    return best


class TestConfigValidation:
    def test_unknown_method(self):
        with pytest.raises(ConfigError, match="annealing"):
            OptimizerConfig(method="annealing")

    @pytest.mark.parametrize("step", [0.0, -0.1, 1.5])
    def test_grid_step_range(self, step):
        with pytest.raises(ConfigError, match="grid_step"):
            OptimizerConfig(method="bf", grid_step=step)

    def test_grid_step_must_divide_one(self):
        with pytest.raises(ConfigError, match="whole number"):
            OptimizerConfig(method="bf", grid_step=0.3)

    def test_grid_step_quarters_ok(self):
        assert OptimizerConfig(method="bf", grid_step=0.25).grid_steps() == 4

    def test_max_evaluations_positive(self):
        with pytest.raises(ConfigError, match="max_evaluations"):
            OptimizerConfig(method="bf", max_evaluations=0)

    def test_stochastic_methods_require_seed(self):
        for method in ("pso", "ga", "powell"):
            with pytest.raises(UsageError, match="seed"):
                OptimizerConfig(method=method)

    def test_deterministic_methods_accept_no_seed(self):
        for method in ("equal", "bf", "nelder-mead"):
            assert OptimizerConfig(method=method).seed is None

    def test_seed_range(self):
        with pytest.raises(ConfigError, match="seed"):
            OptimizerConfig(method="pso", seed=-1)
        with pytest.raises(ConfigError, match="seed"):
            OptimizerConfig(method="pso", seed=2 ** 64)

    def test_unknown_param_rejected(self):
        with pytest.raises(ConfigError, match="swarm_sze"):
            OptimizerConfig(method="pso", seed=1, params={"swarm_sze": 10})

    def test_params_rejected_for_parameterless_methods(self):
        with pytest.raises(ConfigError):
            OptimizerConfig(method="bf", params={"swarm_size": 10})

    def test_pso_swarm_too_small(self):
        with pytest.raises(ConfigError, match="swarm_size"):
            OptimizerConfig(method="pso", seed=1, params={"swarm_size": 1})

    def test_ga_population_too_small(self):
        with pytest.raises(ConfigError, match="population_size"):
            OptimizerConfig(method="ga", seed=1, params={"population_size": 2})

    def test_powell_restarts_positive(self):
        with pytest.raises(ConfigError, match="restarts"):
            OptimizerConfig(method="powell", seed=1, params={"restarts": 0})

    def test_nelder_mead_tolerance_positive(self):
        with pytest.raises(ConfigError, match="spread_tolerance"):
            OptimizerConfig(method="nelder-mead", params={"spread_tolerance": 0.0})

    def test_integer_param_rejects_fraction(self):
        with pytest.raises(ConfigError, match="integer"):
            OptimizerConfig(method="pso", seed=1, params={"swarm_size": 10.5})

    def test_integral_float_param_accepted(self):
        cfg = OptimizerConfig(method="pso", seed=1, params={"swarm_size": 10.0})
        assert cfg.resolved()["swarm_size"] == 10


def _small_cfg(method, seed=42):
    """Reduced budgets keep the whole-suite runtime low."""
    params = {
        "pso": {"swarm_size": 12, "iterations": 30},
        "ga": {"population_size": 16, "generations": 25},
        "powell": {"restarts": 2},
        "nelder-mead": {},
        "bf": {},
        "equal": {},
    }[method]
    return OptimizerConfig(
        method=method,
        seed=seed if method in ("pso", "ga", "powell") else None,
        params=params,
    )


class TestOptimizeContract:
    def test_single_model_every_method_returns_unit_weight(self):
        ds = random_dataset(np.random.default_rng(0), n_models=1, n_samples=6)
        objective = make_objective(ds)
        for method in METHODS:
            result = optimize(objective, 1, _small_cfg(method))
            np.testing.assert_array_equal(result.best_weights.values, [1.0])

    def test_equal_method_is_single_evaluation(self):
        ds = hand_dataset()
        result = optimize(make_objective(ds), 2, OptimizerConfig(method="equal"))
        assert result.evaluations == 1
        np.testing.assert_allclose(result.best_weights.values, [0.5, 0.5],
                                   rtol=0, atol=1e-15)

    def test_identical_config_is_bit_identical(self):
        ds = tiered_dataset(11, n_samples=60)
        objective = make_objective(ds)
        for method in METHODS:
            cfg = _small_cfg(method)
            a = optimize(objective, 3, cfg)
            b = optimize(objective, 3, cfg)
            assert result_to_json(a) == result_to_json(b), method

    def test_different_seeds_still_improve_on_first_candidate(self):
        for seed in (7, 1234):
            result = optimize(v_landscape, 2, _small_cfg("pso", seed=seed))
            first_tracked_error = result.trace[0][1]
            assert result.best_error <= first_tracked_error

    def test_trace_is_non_increasing_and_within_budget(self):
        ds = tiered_dataset(5, n_samples=80)
        objective = make_objective(ds)
        for method in METHODS:
            result = optimize(objective, 3, _small_cfg(method))
            errors = [e for _, e in result.trace]
            assert errors == sorted(errors, reverse=True) or all(
                a >= b for a, b in zip(errors, errors[1:])
            ), method
            indices = [i for i, _ in result.trace]
            assert indices == sorted(indices)
            assert result.evaluations <= OptimizerConfig(method="equal").max_evaluations

    def test_best_error_matches_reevaluation_at_best_weights(self):
        ds = tiered_dataset(3, n_samples=60)
        objective = make_objective(ds)
        for method in METHODS:
            result = optimize(objective, 3, _small_cfg(method))
            assert objective(result.best_weights.values) == result.best_error, method

    def test_returned_weights_are_normalized(self):
        ds = tiered_dataset(8, n_samples=40)
        objective = make_objective(ds)
        for method in METHODS:
            result = optimize(objective, 3, _small_cfg(method))
            values = result.best_weights.values
            assert np.all(values >= 0.0)
            assert abs(math.fsum(values.tolist()) - 1.0) <= 1e-12

    def test_budget_caps_evaluations(self):
        cfg = OptimizerConfig(method="pso", seed=3, max_evaluations=50)
        result = optimize(v_landscape, 2, cfg)
        assert result.evaluations == 50

    def test_budget_respected_by_every_method(self):
        for method in METHODS:
            cfg = OptimizerConfig(
                method=method,
                seed=5 if method in ("pso", "ga", "powell") else None,
                max_evaluations=37,
                grid_step=0.25,
            )
            result = optimize(v_landscape, 2, cfg)
            assert result.evaluations <= 37, method

    def test_zero_models_rejected(self):
        with pytest.raises(ConfigError):
            optimize(v_landscape, 0, OptimizerConfig(method="bf"))

    def test_wrapper_functions_check_method(self):
        cfg = OptimizerConfig(method="pso", seed=1)
        with pytest.raises(ConfigError):
            genetic(v_landscape, 2, cfg)
        with pytest.raises(ConfigError):
            powell(v_landscape, 2, cfg)
        with pytest.raises(ConfigError):
            nelder_mead(v_landscape, 2, cfg)
        assert pso(v_landscape, 2, cfg).best_error <= 1e-3


def vertex_landscape(raw):
    """Unique optimum (value 0) at the one-hot vertex of the first model."""
    w = exact_simplex(np.asarray(raw, dtype=np.float64))
    return 1.0 - float(w[0])


class TestConvergence:
    @pytest.mark.parametrize("method,seed,tolerance", [
        ("pso", 42, 1e-3),
        ("ga", 42, 1e-2),
        ("powell", 42, 1e-3),
        ("nelder-mead", None, 1e-3),
        ("bf", None, 1e-3),
    ])
    def test_analytic_landscape_under_defaults(self, method, seed, tolerance):
        result = optimize(v_landscape, 2, OptimizerConfig(method=method, seed=seed))
        assert result.best_error <= tolerance

    def test_pso_reaches_one_hot_vertex(self):
        result = optimize(vertex_landscape, 3, OptimizerConfig(method="pso", seed=42))
        assert result.best_error <= 1e-3

    def test_ga_reaches_one_hot_vertex(self):
        result = optimize(vertex_landscape, 3, OptimizerConfig(method="ga", seed=42))
        assert result.best_error <= 1e-2


class TestBruteForce:
    def test_grid_count_matches_stars_and_bars(self):
        # C(20 + 3 - 1, 3 - 1) = C(22, 2) = 231 simplex points for step 0.05;
        # the appended one-hots already sit on the grid, equal weights does not.
        assert simplex_grid_size(20, 3) == math.comb(22, 2) == 231
        counter = {"n": 0}

        def counting(raw):
            counter["n"] += 1
            return 0.5

        result = brute_force(counting, 3, grid_step=0.05)
        assert counter["n"] == 232
        assert result.evaluations == 232

    def test_single_model_is_one_evaluation(self):
        result = brute_force(lambda raw: 0.0, 1, grid_step=0.05)
        assert result.evaluations == 1
        np.testing.assert_array_equal(result.best_weights.values, [1.0])

    @pytest.mark.parametrize("n_models,step", [(2, 0.25), (2, 0.1), (3, 0.25), (3, 0.1)])
    def test_matches_independent_oracle(self, n_models, step):
        ds = random_dataset(np.random.default_rng(17), n_models=n_models, n_samples=40)
        objective = make_objective(ds)
        result = brute_force(objective, n_models, grid_step=step)
        oracle_error, oracle_raw = oracle_brute_force(
            objective, n_models, round(1 / step))
        assert result.best_error == oracle_error
        np.testing.assert_array_equal(
            result.best_weights.values, exact_simplex(np.array(oracle_raw)))

    def test_tie_break_prefers_lexicographically_smallest(self):
        result = brute_force(lambda raw: 0.25, 2, grid_step=0.25)
        np.testing.assert_array_equal(result.best_weights.values, [0.0, 1.0])

    def test_recovers_perfect_model(self):
        # Ten samples where the first model is barely right everywhere and the
        # second is confidently wrong; fused scores are correct on every
        # sample only when the first weight exceeds 0.9, so on the 0.25 grid
        # the sole zero-error candidate is (1, 0).
        from fusionopt.scoreio import LabelVector, ScoreMatrix, align

        ids = tuple(f"s{i}" for i in range(10))
        labels = np.array([0, 1] * 5)
        m1 = np.array([[0.55, 0.45] if y == 0 else [0.45, 0.55] for y in labels])
        m2 = np.array([[0.05, 0.95] if y == 0 else [0.95, 0.05] for y in labels])
        ds = align(
            [ScoreMatrix("good", ids, m1), ScoreMatrix("bad", ids, m2)],
            LabelVector(ids, labels),
        )
        result = brute_force(make_objective(ds), 2, grid_step=0.25)
        assert result.best_error == 0.0
        np.testing.assert_array_equal(result.best_weights.values, [1.0, 0.0])

    def test_grid_exceeding_budget_is_an_error(self):
        with pytest.raises(ConfigError, match="budget"):
            brute_force(lambda raw: 0.0, 3, grid_step=0.05, max_evaluations=100)

    def test_dominates_equal_weights_and_one_hots(self):
        for seed in range(5):
            ds = tiered_dataset(seed, n_samples=60)
            objective = make_objective(ds)
            result = brute_force(objective, 3)
            assert result.best_error <= cumulative_error(
                ds, WeightVector(np.full(3, 1 / 3)))
            for j in range(3):
                one_hot = np.zeros(3)
                one_hot[j] = 1.0
                assert result.best_error <= cumulative_error(ds, WeightVector(one_hot))

    def test_all_zero_extra_point_is_never_chosen(self):
        result = brute_force(lambda raw: 0.5, 2, grid_step=0.5,
                             extra_points=[np.zeros(2)])
        assert result.best_error == 0.5
        assert np.any(result.best_weights.values > 0)


class TestTracker:
    def test_all_zero_candidates_are_scored_not_evaluated(self):
        def touchy(raw):
            assert np.any(raw > 0), "objective must never see an all-zero vector"
            return 0.9

        tracker = EvaluationTracker(touchy, 10)
        assert tracker.evaluate(np.zeros(3)) == 1.0
        assert tracker.evaluate(np.array([0.2, 0.0, 0.0])) == 0.9
        assert tracker.evaluations == 2
        np.testing.assert_array_equal(tracker.best_raw, [0.2, 0.0, 0.0])


class TestGenetic:
    def test_stall_window_stops_early_on_flat_landscape(self):
        cfg = OptimizerConfig(
            method="ga", seed=4,
            params={"population_size": 10, "generations": 100,
                    "elitism": 2, "stall_window": 5},
        )
        result = optimize(lambda raw: 0.5, 3, cfg)
        # init (10) plus five stalled generations of 8 children each
        assert result.evaluations == 10 + 5 * 8


class TestPowell:
    def test_quadratic_bowl_single_restart(self):
        cfg = OptimizerConfig(method="powell", seed=0, params={"restarts": 1})
        result = optimize(quadratic_bowl([0.7, 0.3]), 2, cfg)
        assert result.best_error <= 1e-10
        np.testing.assert_allclose(result.best_weights.values, [0.7, 0.3],
                                   rtol=0, atol=5e-6)

    def test_single_restart_ignores_seed(self):
        cfg_a = OptimizerConfig(method="powell", seed=1, params={"restarts": 1})
        cfg_b = OptimizerConfig(method="powell", seed=99, params={"restarts": 1})
        a = optimize(quadratic_bowl([0.4, 0.6]), 2, cfg_a)
        b = optimize(quadratic_bowl([0.4, 0.6]), 2, cfg_b)
        assert a.best_error == b.best_error
        np.testing.assert_array_equal(a.best_weights.values, b.best_weights.values)

    def test_never_worse_than_equal_weights_start(self):
        for seed in range(4):
            ds = tiered_dataset(20 + seed, n_samples=80)
            objective = make_objective(ds)
            cfg = OptimizerConfig(method="powell", seed=seed)
            result = optimize(objective, 3, cfg)
            assert result.best_error <= objective(np.full(3, 1 / 3))


class TestNelderMead:
    def test_simplex_always_has_m_plus_one_vertices(self):
        sizes = []

        def record(vertices, errors):
            sizes.append((len(vertices), len(errors)))

        tracker = EvaluationTracker(quadratic_bowl([0.3, 0.5, 0.2]), 10_000)
        params = OptimizerConfig(method="nelder-mead").resolved()
        nm_run(tracker, 3, params, on_iteration=record)
        assert sizes, "expected at least one iteration"
        assert all(size == (4, 4) for size in sizes)

    def test_spread_below_tolerance_at_termination(self):
        states = []

        def record(vertices, errors):
            states.append(list(errors))

        tracker = EvaluationTracker(quadratic_bowl([0.6, 0.4]), 10_000)
        params = OptimizerConfig(method="nelder-mead").resolved()
        nm_run(tracker, 2, params, on_iteration=record)
        assert len(states) < params["max_iterations"], "terminated by the cap, not spread"
        final = states[-1]
        assert max(final) - min(final) < params["spread_tolerance"]
        # analytic minimum of the bowl is 0 at its interior center
        assert tracker.best_error <= 1e-6

    def test_single_model_degenerates_cleanly(self):
        result = optimize(lambda raw: 0.0, 1, OptimizerConfig(method="nelder-mead"))
        np.testing.assert_array_equal(result.best_weights.values, [1.0])


class TestTraceSerialization:
    def test_trace_csv_format(self, tmp_path):
        result = optimize(v_landscape, 2, _small_cfg("pso"))
        out = tmp_path / "trace.csv"
        write_trace_csv(result, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "evaluation,best_error"
        assert len(lines) == 1 + len(result.trace)
        first_index, first_error = lines[1].split(",")
        assert int(first_index) == result.trace[0][0]
        assert float(first_error) == result.trace[0][1]

    def test_result_json_fields(self):
        import json

        result = optimize(v_landscape, 2, _small_cfg("ga"))
        payload = json.loads(result_to_json(result))
        assert set(payload) == {"method", "seed", "best_error", "best_weights",
                                "evaluations", "trace"}
        assert payload["method"] == "ga"
        assert payload["seed"] == 42
        assert payload["evaluations"] == result.evaluations
