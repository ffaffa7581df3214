import math
import unittest

import numpy as np

from tabutune.tests.common import TabutuneTestCase, make_dataset, planted_dataset
from tabutune.learners import get_learner
from tabutune.tuning import (
    FAILED_AUC, BudgetError, EvaluationError, ParamKind, ParamSpace, ParamSpec, TabuState, TsConfig,
    gbt_space, grid_search, init_solution, make_objective, mlp_space, neighbor, points_for_budget, ts_optimize,
)
from tabutune.tuning.tabu import _select


def quadratic_space() -> ParamSpace:
    return ParamSpace([
        ParamSpec(name="x", kind=ParamKind.integer, lower=0, upper=20, init_lower=0, init_upper=5),
        ParamSpec(name="y", kind=ParamKind.integer, lower=0, upper=20, init_lower=0, init_upper=5),
    ], name="quadratic")


def quadratic(vector: tuple[float, ...]) -> float:
    x, y = vector
    return -((x - 13) ** 2) - (y - 7) ** 2


class TestSpace(TabutuneTestCase):
    def test_worked_move(self) -> None:
        space = gbt_space()
        current = (3., 3., 0.05, 0.5, 2., 2.)
        moved = neighbor(current, space, np.random.default_rng(0), deltas=[0, 0, 0.008, 0, 0, 0])
        self.assertAlmostEqual(moved[2], 0.058, places=12)
        self.assertEqual(moved[:2], (3., 3.))

    def test_clamp_and_round(self) -> None:
        space = gbt_space()
        moved = neighbor((49., 3., 0.95, 0.5, 2., 2.), space, np.random.default_rng(0), deltas=[5, 0.6, 0.2, -3, 0, 0])
        self.assertEqual(moved[0], 50.)
        self.assertEqual(moved[1], 4.)
        self.assertEqual(moved[2], 1.)
        self.assertEqual(moved[3], 0.)

    def test_init_inside_subranges(self) -> None:
        space = mlp_space()
        rng = np.random.default_rng(1)
        for _ in range(50):
            vector = init_solution(space, rng)
            self.assertTrue(space.contains(vector))
            for spec, value in zip(space.specs, vector):
                self.assertGreaterEqual(value, spec.init_lower)
                self.assertLessEqual(value, spec.init_upper)

    def test_key_rounding(self) -> None:
        space = gbt_space()
        self.assertEqual(space.key((3., 3., 0.1000000001, 0., 0., 1.)), space.key((3., 3., 0.1, 0., 0., 1.)))

    def test_single_grid_point_is_midpoint(self) -> None:
        self.assertEqual(gbt_space().specs[0].grid(1), [26.])
        self.assertEqual(gbt_space().specs[2].grid(1), [0.5])


class TestTabuState(TabutuneTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.space = ParamSpace([ParamSpec(name="x", kind=ParamKind.integer, lower=0, upper=100)])

    def test_bounded_list(self) -> None:
        state = TabuState(self.space, (0.,), 0., tabu_length=20)
        for value in range(1, 30):
            state.make_tabu((float(value),))
        self.assertEqual(len(state.tabu_list), 20)
        self.assertFalse(state.is_tabu((0.,)))
        self.assertTrue(state.is_tabu((29.,)))

    def test_aspiration(self) -> None:
        state = TabuState(self.space, (5.,), 1., tabu_length=20)
        state.make_tabu((6.,))
        chosen, aspiration = _select(state, [(6.,), (4.,)], [2., 0.5])
        self.assertEqual(chosen, 0)
        self.assertTrue(aspiration)

    def test_non_tabu_preferred(self) -> None:
        state = TabuState(self.space, (5.,), 1., tabu_length=20)
        state.make_tabu((6.,))
        chosen, aspiration = _select(state, [(6.,), (4.,)], [0.9, 0.5])
        self.assertEqual(chosen, 1)
        self.assertFalse(aspiration)

    def test_all_tabu_takes_oldest(self) -> None:
        state = TabuState(self.space, (5.,), 1., tabu_length=20)
        state.make_tabu((6.,))
        chosen, aspiration = _select(state, [(6.,), (5.,)], [0.9, 0.8])
        self.assertEqual(chosen, 1)
        self.assertFalse(aspiration)


class TestTabuSearch(TabutuneTestCase):
    def test_finds_grid_optimum(self) -> None:
        space = quadratic_space()
        result = ts_optimize(space, quadratic, TsConfig(max_iterations=300, seed=4))
        grid = grid_search(space, quadratic, 21)
        self.assertEqual(grid.best_vector, (13., 7.))
        self.assertEqual(result.best_vector, grid.best_vector)
        self.assertEqual(result.best_objective, 0.)

    def test_trace_properties(self) -> None:
        space = quadratic_space()
        result = ts_optimize(space, quadratic, TsConfig(max_iterations=100, seed=2))
        self.assertEqual(len(result.convergence), 101)
        for before, after in zip(result.convergence[:-1], result.convergence[1:]):
            self.assertLessEqual(before, after)
        for record in result.trace:
            for spec in space.specs:
                self.assertTrue(spec.lower <= record.params[spec.name] <= spec.upper)
        self.assertEqual(result.evaluations, 1 + 100 * 10)
        self.assertEqual(sum(record.accepted for record in result.trace), 101)

    def test_tabu_moves_flagged(self) -> None:
        result = ts_optimize(quadratic_space(), quadratic, TsConfig(max_iterations=100, seed=2))
        iterations: dict[int, list] = {}
        for record in result.trace[1:]:
            iterations.setdefault(record.iteration, []).append(record)

        for records in iterations.values():
            accepted = [record for record in records if record.accepted]
            self.assertEqual(len(accepted), 1)
            move = accepted[0]
            if move.aspiration:
                self.assertTrue(move.tabu_hit)
            elif move.tabu_hit:
                # only taken when nothing else was admissible
                self.assertTrue(all(record.tabu_hit for record in records))

    def test_deterministic(self) -> None:
        space = quadratic_space()
        first = ts_optimize(space, quadratic, TsConfig(max_iterations=40, seed=7))
        second = ts_optimize(space, quadratic, TsConfig(max_iterations=40, seed=7))
        self.assertEqual(first.trace, second.trace)

    def test_parallel_matches_sequential(self) -> None:
        space = quadratic_space()
        first = ts_optimize(space, quadratic, TsConfig(max_iterations=20, seed=7))
        second = ts_optimize(space, quadratic, TsConfig(max_iterations=20, seed=7, workers=4))
        self.assertEqual(first.trace, second.trace)

    def test_diversification(self) -> None:
        result = ts_optimize(quadratic_space(), quadratic, TsConfig(max_iterations=5, diversification_prob=1., seed=0))
        self.assertTrue(all(record.diversified for record in result.trace if record.iteration > 0))

    def test_zero_iterations(self) -> None:
        result = ts_optimize(quadratic_space(), quadratic, TsConfig(max_iterations=0, seed=0))
        self.assertEqual(result.evaluations, 1)
        self.assertEqual(result.best_objective, result.convergence[0])

    def test_evaluation_error(self) -> None:
        with self.assertRaises(EvaluationError):
            ts_optimize(quadratic_space(), lambda vector: math.nan, TsConfig(max_iterations=1))

        def broken(vector: tuple[float, ...]) -> float:
            raise RuntimeError("boom")

        with self.assertRaises(EvaluationError) as context:
            ts_optimize(quadratic_space(), broken, TsConfig(max_iterations=1))
        self.assertEqual(len(context.exception.vector), 2)


class TestGrid(TabutuneTestCase):
    def test_budget_checked_first(self) -> None:
        calls = []

        def objective(vector: tuple[float, ...]) -> float:
            calls.append(vector)
            return 0.

        with self.assertRaises(BudgetError):
            grid_search(quadratic_space(), objective, 10, budget=50)
        self.assertEqual(calls, [])

    def test_ties_take_smallest(self) -> None:
        result = grid_search(quadratic_space(), lambda vector: 1., 3)
        self.assertEqual(result.best_vector, (0., 0.))
        self.assertEqual(result.evaluations, 9)

    def test_points_for_budget(self) -> None:
        self.assertEqual(points_for_budget(gbt_space(), 64), [2] * 6)
        self.assertEqual(points_for_budget(gbt_space(), 3000), [3] * 6)
        with self.assertRaises(BudgetError):
            points_for_budget(gbt_space(), 0)


class TestObjective(TabutuneTestCase):
    def test_auc_and_memo(self) -> None:
        data = planted_dataset(n=200, seed=1)
        train = data.take(np.arange(140))
        test = data.take(np.arange(140, 200))
        space = gbt_space()
        objective = make_objective(get_learner("gbt"), space, train, test, seed=0)

        vector = (3., 2., 0.3, 0., 0., 1.)
        first = objective(vector)
        self.assertGreater(first, 0.8)
        self.assertEqual(objective(vector), first)
        self.assertGreaterEqual(objective.cache.hits, 1)

    def test_failed_fit_scores_half(self) -> None:
        train = make_dataset([[0.], [1.], [2.]], [1, 1, 1])
        test = make_dataset([[0.], [1.]], [0, 1])
        objective = make_objective(get_learner("gbt"), gbt_space(), train, test)
        self.assertEqual(objective((3., 2., 0.3, 0., 0., 1.)), FAILED_AUC)
        self.assertEqual(objective.failures, 1)


if __name__ == '__main__':
    unittest.main(verbosity=2)
