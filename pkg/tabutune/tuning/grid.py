from __future__ import annotations

import itertools
import logging
import math
import time
from typing import Any, Sequence

from tabutune.tuning.space import ParamSpace, ParamVector
from tabutune.tuning.tabu import Objective, TraceRecord, evaluate_all
from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)


class BudgetError(ValueError):
    pass


class GridResult(BaseModel):
    best_vector: tuple[float, ...]
    best_params: dict[str, int | float]
    best_objective: float
    evaluations: int
    points: list[int]
    wall_seconds: float
    trace: list[TraceRecord] = Field(default_factory=list)

    def summary(self) -> dict[str, Any]:
        return {
            "best_params": self.best_params,
            "best_auc": self.best_objective,
            "points": self.points,
            "wall_seconds": self.wall_seconds,
        }


def points_for_budget(space: ParamSpace, budget: int) -> list[int]:
    """
    Equal point count per parameter so that the full product fits the budget.
    """
    if budget < 1:
        raise BudgetError(f"grid budget must be positive: {budget}")
    per_param = max(1, int(math.floor(budget ** (1 / len(space)) + 1e-9)))
    while per_param > 1 and per_param ** len(space) > budget:
        per_param -= 1
    return [per_param] * len(space)


def grid_search(space: ParamSpace, objective: Objective, points: Sequence[int] | int, budget: int | None=None, workers: int=1) -> GridResult:
    """
    Exhaustive search over evenly spaced values of every parameter.
    Equal objectives resolve to the lexicographically smallest vector.
    """
    if isinstance(points, int):
        points = [points] * len(space)
    if len(points) != len(space):
        raise ValueError(f"{len(points)} grid sizes for {len(space)} parameters")

    axes = [spec.grid(count) for spec, count in zip(space.specs, points)]
    size = math.prod(len(axis) for axis in axes)
    if budget is not None and size > budget:
        raise BudgetError(f"grid of {size} points exceeds the budget of {budget} evaluations")

    start = time.perf_counter()
    # product of ascending axes runs in lexicographic order
    vectors: list[ParamVector] = [tuple(values) for values in itertools.product(*axes)]
    objectives = evaluate_all(objective, vectors, workers)

    best = 0
    for index, value in enumerate(objectives):
        if value > objectives[best]:
            best = index

    wall_seconds = time.perf_counter() - start
    logger.info(f"grid {space.name}: {size} points, best {objectives[best]:.6f} at {vectors[best]}")

    return GridResult(
        best_vector=vectors[best],
        best_params=space.as_dict(vectors[best]),
        best_objective=objectives[best],
        evaluations=size,
        points=[len(axis) for axis in axes],
        wall_seconds=wall_seconds,
        trace=[
            TraceRecord(iteration=index, params=space.as_dict(vector), objective=value, accepted=index == best)
            for index, (vector, value) in enumerate(zip(vectors, objectives))
        ]
    )
