from __future__ import annotations

import collections
import logging
import math
import time
from typing import Any, Callable

import numpy as np
import pydantic

from tabutune.tuning.space import ParamSpace, ParamVector, init_solution, neighbor
from tabutune.utils.dataclass import BaseModel, Field
from tabutune.utils.queue import AsyncTaskQueue

logger = logging.getLogger(__name__)

Objective = Callable[[ParamVector], float]


class EvaluationError(ValueError):
    def __init__(self, vector: ParamVector, message: str):
        self.vector = vector
        super().__init__(f"objective failed at {vector}: {message}")


class TsConfig(BaseModel):
    max_iterations: int = pydantic.Field(300, ge=0)
    diversification_prob: float = pydantic.Field(0.002, ge=0, le=1)
    neighborhood_size: int = pydantic.Field(10, ge=1)
    tabu_length: int = pydantic.Field(20, ge=1)
    intensify_after: int = pydantic.Field(30, ge=1)
    sigma_large: float = pydantic.Field(2., gt=0)
    sigma_unit: float = pydantic.Field(0.1, gt=0)
    seed: int = 0
    workers: int = pydantic.Field(1, ge=1)


class TraceRecord(BaseModel):
    iteration: int
    params: dict[str, int | float]
    objective: float
    accepted: bool = False
    tabu_hit: bool = False
    diversified: bool = False
    aspiration: bool = False


class TabuState:
    """
    Search memory: the current point, the bounded tabu list (oldest first)
    and the best point seen so far.
    """
    def __init__(self, space: ParamSpace, current: ParamVector, objective: float, tabu_length: int):
        self.space = space
        self.current = current
        self.tabu_list: collections.deque[ParamVector] = collections.deque(maxlen=tabu_length)
        self.best_ever = (current, objective)
        self.iteration = 0
        self.stall = 0
        self.make_tabu(current)

    def is_tabu(self, vector: ParamVector) -> bool:
        return self.space.key(vector) in self.tabu_list

    def tabu_age(self, vector: ParamVector) -> int:
        """
        Position in the tabu list, 0 being the oldest entry.
        """
        return list(self.tabu_list).index(self.space.key(vector))

    def make_tabu(self, vector: ParamVector) -> None:
        key = self.space.key(vector)
        if key in self.tabu_list:
            self.tabu_list.remove(key)
        self.tabu_list.append(key)

    def update_best(self, vector: ParamVector, objective: float) -> bool:
        if objective > self.best_ever[1]:
            self.best_ever = (vector, objective)
            self.stall = 0
            return True
        self.stall += 1
        return False


class TsResult(BaseModel):
    best_vector: tuple[float, ...]
    best_params: dict[str, int | float]
    best_objective: float
    iterations: int
    evaluations: int
    wall_seconds: float
    convergence: list[float] = Field(default_factory=list)
    trace: list[TraceRecord] = Field(default_factory=list)

    def summary(self) -> dict[str, Any]:
        return {
            "best_params": self.best_params,
            "best_auc": self.best_objective,
            "iterations": self.iterations,
            "wall_seconds": self.wall_seconds,
        }


def evaluate(objective: Objective, vector: ParamVector) -> float:
    try:
        value = float(objective(vector))
    except EvaluationError:
        raise
    except Exception as e:
        raise EvaluationError(vector, str(e)) from e

    if not math.isfinite(value):
        raise EvaluationError(vector, f"non-finite objective {value}")
    return value


def evaluate_all(objective: Objective, vectors: list[ParamVector], workers: int=1) -> list[float]:
    """
    Objective values in candidate order whatever order the workers finish in.
    """
    jobs = [lambda vector=vector: evaluate(objective, vector) for vector in vectors]  # type: ignore[misc]
    return AsyncTaskQueue(workers).map(jobs)


def _select(state: TabuState, candidates: list[ParamVector], objectives: list[float]) -> tuple[int, bool]:
    """
    Best admissible candidate: non-tabu, or tabu but beating the best ever.
    With every candidate blocked the one tabu for longest is taken.
    """
    order = sorted(range(len(candidates)), key=lambda index: -objectives[index])
    for index in order:
        if not state.is_tabu(candidates[index]):
            return index, False
        if objectives[index] > state.best_ever[1]:
            logger.debug(f"aspiration: tabu candidate {candidates[index]} beats best {state.best_ever[1]:.6f}")
            return index, True

    oldest = min(order, key=lambda index: (state.tabu_age(candidates[index]), -objectives[index], index))
    return oldest, False


def ts_optimize(space: ParamSpace, objective: Objective, config: TsConfig | None=None) -> TsResult:
    """
    Tabu search maximizing `objective` over the parameter space.
    """
    config = config or TsConfig()
    rng = np.random.default_rng(config.seed)
    start = time.perf_counter()

    initial = init_solution(space, rng)
    initial_objective = evaluate(objective, initial)
    state = TabuState(space, initial, initial_objective, config.tabu_length)

    trace = [TraceRecord(iteration=0, params=space.as_dict(initial), objective=initial_objective, accepted=True)]
    convergence = [initial_objective]
    logger.info(f"ts {space.name}: start {initial} -> {initial_objective:.6f}")

    for iteration in range(1, config.max_iterations + 1):
        state.iteration = iteration
        candidates = [
            neighbor(state.current, space, rng, config.sigma_large, config.sigma_unit)
            for _ in range(config.neighborhood_size)
        ]
        objectives = evaluate_all(objective, candidates, config.workers)
        tabu_hits = [state.is_tabu(candidate) for candidate in candidates]

        chosen, aspiration = _select(state, candidates, objectives)
        state.current = candidates[chosen]
        state.make_tabu(state.current)

        if state.update_best(candidates[chosen], objectives[chosen]):
            logger.info(f"ts {space.name} iteration {iteration}: best {objectives[chosen]:.6f} at {candidates[chosen]}")

        if state.stall >= config.intensify_after:
            logger.debug(f"ts {space.name} iteration {iteration}: no improvement for {state.stall} iterations, back to best")
            state.current = state.best_ever[0]
            state.stall = 0

        diversified = bool(rng.random() < config.diversification_prob)
        if diversified:
            state.current = init_solution(space, rng, full_range=True)
            logger.debug(f"ts {space.name} iteration {iteration}: diversified to {state.current}")

        for index, (candidate, value) in enumerate(zip(candidates, objectives)):
            trace.append(TraceRecord(
                iteration=iteration,
                params=space.as_dict(candidate),
                objective=value,
                accepted=index == chosen,
                aspiration=aspiration and index == chosen,
                tabu_hit=tabu_hits[index],
                diversified=diversified
            ))
        convergence.append(state.best_ever[1])

    best_vector, best_objective = state.best_ever
    wall_seconds = time.perf_counter() - start
    logger.info(f"ts {space.name}: best {best_objective:.6f} after {config.max_iterations} iterations ({wall_seconds:.1f}s)")

    return TsResult(
        best_vector=best_vector,
        best_params=space.as_dict(best_vector),
        best_objective=best_objective,
        iterations=config.max_iterations,
        evaluations=len(trace),
        wall_seconds=wall_seconds,
        convergence=convergence,
        trace=trace
    )
