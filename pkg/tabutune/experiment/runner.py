from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from tabutune.dataset import Dataset
from tabutune.experiment.config import Algorithm, ExperimentConfig
from tabutune.experiment.pipeline import PreparedData, load_source, prepare
from tabutune.feature_selection import SelectionMethod, SelectionResult
from tabutune.learners import TrainedModel, get_learner, score
from tabutune.metrics import MetricsReport, evaluate
from tabutune.resampling import smote
from tabutune.tuning import TraceRecord, grid_search, make_objective, points_for_budget, space_for, ts_optimize
from tabutune.utils import derive_seed
from tabutune.utils.dataclass import BaseModel, Field
from tabutune.utils.queue import AsyncTaskQueue
import tabutune.jsonify

logger = logging.getLogger(__name__)

TRACE_DIRECTORY = "traces"
RECORDS_FILE = "records.json"
SELECTION_FILE = "selection.json"


class RunRecord(BaseModel):
    group: SelectionMethod
    algorithm: Algorithm
    metrics: MetricsReport | None = None
    best_params: dict[str, int | float] = Field(default_factory=dict)
    best_objective: float | None = None
    evaluations: int = 0
    features: list[str] = Field(default_factory=list)
    split_counts: dict[str, int] = Field(default_factory=dict)
    convergence: list[float] = Field(default_factory=list)
    trace_path: str | None = None
    wall_seconds: float = 0.
    failed: bool = False
    error: str | None = None

    @property
    def name(self) -> str:
        return f"{self.algorithm.value}_{self.group.value}"

    @property
    def auc(self) -> float | None:
        return self.metrics.auc if self.metrics is not None else None


def cell_seed(config: ExperimentConfig, group: SelectionMethod, algorithm: Algorithm) -> int:
    return derive_seed(config.seed, "cell", group.value, algorithm.value)


def write_trace(path: Path, trace: Sequence[TraceRecord]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as outfile:
        for record in trace:
            outfile.write(json.dumps(record.model_dump(mode="json"), sort_keys=True))
            outfile.write("\n")


def read_trace(path: str | Path) -> list[TraceRecord]:
    with open(path) as infile:
        return [TraceRecord.model_validate(json.loads(line)) for line in infile if line.strip()]


def fit_and_evaluate(algorithm: Algorithm, params: dict[str, Any], train: Dataset, test: Dataset, seed: int) -> tuple[TrainedModel, MetricsReport]:
    learner = get_learner(algorithm.learner_name)
    model = learner.fit(train, learner.params_from_dict(params), seed)
    return model, evaluate(test.labels, score(model, test))


def run_cell(config: ExperimentConfig, data: PreparedData, group: SelectionMethod, algorithm: Algorithm) -> RunRecord:
    """
    Tune one (group, algorithm) cell on the tuning partition, refit the
    winner on the whole training split and score the reporting test split.
    """
    start = time.perf_counter()
    seed = cell_seed(config, group, algorithm)
    record = RunRecord(group=group, algorithm=algorithm)

    if group not in data.groups:
        raise ValueError(data.selection_errors.get(group, f"feature group {group.value} not available"))
    selection = data.groups[group]
    learner = get_learner(algorithm.learner_name)
    route = data.route(learner)
    space = space_for(algorithm.learner_name)
    smote_config = config.smote.model_copy(update={"seed": seed})

    tune_train = smote(selection.apply(route.tune_train), smote_config)
    objective = make_objective(learner, space, tune_train, selection.apply(route.tune_test), seed)

    logger.info(f"cell {algorithm.label} / {group.value}: {len(selection.selected)} features, {tune_train.n} tuning rows")

    if algorithm.tuned:
        result = ts_optimize(space, objective, config.tabu.model_copy(update={"seed": seed}))
        best_vector, best_objective, trace = result.best_vector, result.best_objective, result.trace
        record.convergence = result.convergence
        record.evaluations = result.evaluations
        summary = result.summary()
    else:
        grid = grid_search(space, objective, points_for_budget(space, config.budget), config.budget, config.tabu.workers)
        best_vector, best_objective, trace = grid.best_vector, grid.best_objective, grid.trace
        record.evaluations = grid.evaluations
        summary = grid.summary()

    trace_path = config.output_path / TRACE_DIRECTORY / f"{record.name}.jsonl"
    write_trace(trace_path, trace)
    with open(trace_path.with_suffix(".summary.json"), "w") as outfile:
        json.dump({**summary, "evaluations": record.evaluations}, outfile, indent=4)

    best_params = space.as_dict(best_vector)
    train = smote(selection.apply(route.train), smote_config)
    model, metrics = fit_and_evaluate(algorithm, best_params, train, selection.apply(route.test), seed)

    counts = model.split_counts()
    record.metrics = metrics
    record.best_params = best_params
    record.best_objective = best_objective
    record.features = selection.selected_names
    record.split_counts = {name: int(count) for name, count in zip(selection.selected_names, counts)}
    record.trace_path = str(trace_path)
    record.wall_seconds = time.perf_counter() - start

    logger.info(f"cell {algorithm.label} / {group.value}: tuning auc {best_objective:.4f}, test auc {metrics.auc:.4f} ({record.wall_seconds:.1f}s)")
    return record


def _safe_cell(config: ExperimentConfig, data: PreparedData, group: SelectionMethod, algorithm: Algorithm) -> RunRecord:
    try:
        return run_cell(config, data, group, algorithm)
    except Exception as e:
        logger.error(f"cell {algorithm.label} / {group.value} failed: {e!r}")
        return RunRecord(group=group, algorithm=algorithm, failed=True, error=f"{type(e).__name__}: {e}")


def save_records(records: list[RunRecord], output_dir: str | Path) -> Path:
    path = Path(output_dir) / RECORDS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as outfile:
        tabutune.jsonify.dump(records, outfile)
    return path


def load_records(output_dir: str | Path) -> list[RunRecord]:
    with open(Path(output_dir) / RECORDS_FILE) as infile:
        return tabutune.jsonify.load(infile)["data"]


def save_selection(groups: dict[SelectionMethod, SelectionResult], output_dir: str | Path) -> Path:
    path = Path(output_dir) / SELECTION_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as outfile:
        tabutune.jsonify.dump({method.value: result for method, result in groups.items()}, outfile)
    return path


def load_selection(path: str | Path) -> dict[SelectionMethod, SelectionResult]:
    with open(path) as infile:
        data = tabutune.jsonify.load(infile)["data"]
    return {SelectionMethod(name): result for name, result in data.items()}


def run_matrix(config: ExperimentConfig, data: PreparedData | None=None) -> list[RunRecord]:
    """
    Every configured (group, algorithm) cell; failed cells are kept as
    failed records so the matrix stays complete.
    """
    if data is None:
        data = prepare(config)

    cells = [(group, algorithm) for group in config.groups for algorithm in config.algorithms]
    logger.info(f"matrix: {len(cells)} cells on {config.parallelism} workers")

    jobs = [lambda group=group, algorithm=algorithm: _safe_cell(config, data, group, algorithm) for group, algorithm in cells]  # type: ignore[misc]
    records = AsyncTaskQueue(config.parallelism).map(jobs)

    failed = [record.name for record in records if record.failed]
    if failed:
        logger.warning(f"{len(failed)} of {len(records)} cells failed: {', '.join(failed)}")

    save_records(records, config.output_dir)
    save_selection(data.groups, config.output_dir)
    return records


def best_record(records: Sequence[RunRecord]) -> RunRecord:
    candidates = [record for record in records if not record.failed and record.metrics is not None]
    if not candidates:
        raise ValueError("no successful record")
    # first maximum wins
    return max(candidates, key=lambda record: record.metrics.auc)  # type: ignore[union-attr]


class SensitivityPoint(BaseModel):
    size: int
    auc: float
    group: SelectionMethod
    algorithm: Algorithm


def auc_spread(points: Sequence[SensitivityPoint]) -> float:
    return float(np.ptp([point.auc for point in points])) if points else 0.


def sensitivity_analysis(config: ExperimentConfig, sizes: Sequence[int], records: Sequence[RunRecord] | None=None, source: Dataset | None=None) -> list[SensitivityPoint]:
    """
    Refit the best cell with its tuned parameters at several sample sizes.
    """
    if not sizes:
        return []
    if records is None:
        records = run_matrix(config)
    best = best_record(records)

    if source is None:
        source = load_source(config)
    seed = cell_seed(config, best.group, best.algorithm)
    learner = get_learner(best.algorithm.learner_name)
    feature_indices = [source.feature_index(name) for name in best.features]

    points = []
    for size in sizes:
        data = prepare(config, source, sample_size=size, with_selection=False)
        route = data.route(learner)
        train = smote(route.train.select_features(feature_indices), config.smote.model_copy(update={"seed": seed}))
        _, metrics = fit_and_evaluate(best.algorithm, best.best_params, train, route.test.select_features(feature_indices), seed)
        logger.info(f"sensitivity: {size} rows -> auc {metrics.auc:.4f}")
        points.append(SensitivityPoint(size=size, auc=metrics.auc, group=best.group, algorithm=best.algorithm))

    logger.info(f"sensitivity: auc spread {auc_spread(points):.4f} over {len(points)} sizes")
    return points
