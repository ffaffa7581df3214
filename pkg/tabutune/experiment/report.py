from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from tabutune.experiment.config import Algorithm
from tabutune.experiment.runner import RunRecord, SensitivityPoint, auc_spread, best_record
from tabutune.feature_selection import SelectionMethod, SelectionResult, selection_table
from tabutune.utils.table import Table

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["auc", "sensitivity", "specificity", "f1", "accuracy"]
TREE_LEARNERS = ("gbt", "adab")


def _ordered(records: Sequence[RunRecord]) -> list[RunRecord]:
    group_order = list(SelectionMethod)
    algorithm_order = list(Algorithm)
    return sorted(records, key=lambda record: (group_order.index(record.group), algorithm_order.index(record.algorithm)))


def metrics_table(records: Sequence[RunRecord]) -> Table:
    """
    One row per record; failed cells keep their row with empty metrics.
    """
    table = Table(name="metrics")
    table.insert_row(["group", "algorithm"] + METRIC_COLUMNS)
    for record in _ordered(records):
        row: list[Any] = [record.group.value, record.algorithm.value]
        if record.metrics is not None:
            values = record.metrics.row()
            row += [values[column] for column in METRIC_COLUMNS]
        table.insert_row(row)
    return table


def metric_table(records: Sequence[RunRecord], metric: str) -> Table:
    """
    Group rows by algorithm columns for a single metric.
    """
    groups = [group for group in SelectionMethod if any(record.group == group for record in records)]
    algorithms = [algorithm for algorithm in Algorithm if any(record.algorithm == algorithm for record in records)]

    table = Table(name=metric)
    table.insert_row(["group"] + [algorithm.label for algorithm in algorithms])
    for row_no, group in enumerate(groups, start=1):
        table[row_no, 0] = group.value
        for column_no, algorithm in enumerate(algorithms, start=1):
            for record in records:
                if record.group == group and record.algorithm == algorithm and record.metrics is not None:
                    table[row_no, column_no] = record.metrics.row()[metric]

    return table


def params_table(records: Sequence[RunRecord], algorithm: Algorithm) -> Table | None:
    """
    Optimal parameters: parameter rows by group columns, closed by the tuning AUC.
    """
    selected = [record for record in _ordered(records) if record.algorithm == algorithm and not record.failed]
    if not selected:
        return None

    names: list[str] = []
    for record in selected:
        for name in record.best_params:
            if name not in names:
                names.append(name)

    table = Table(name=f"params_{algorithm.value}")
    table.insert_row(["parameter"] + [record.group.value for record in selected])
    for row_no, name in enumerate(names + ["Optimal AUC"], start=1):
        table[row_no, 0] = name
        for column_no, record in enumerate(selected, start=1):
            if name == "Optimal AUC":
                table[row_no, column_no] = record.best_objective
            else:
                table[row_no, column_no] = record.best_params.get(name)

    return table


def convergence_table(records: Sequence[RunRecord]) -> Table | None:
    """
    Best-so-far objective per iteration, one column per tuned cell.
    """
    tuned = [record for record in _ordered(records) if record.convergence]
    if not tuned:
        return None

    table = Table(name="convergence")
    table.insert_row(["iteration"] + [record.name for record in tuned])
    length = max(len(record.convergence) for record in tuned)
    for iteration in range(length):
        table[iteration + 1, 0] = iteration
        for column_no, record in enumerate(tuned, start=1):
            if iteration < len(record.convergence):
                table[iteration + 1, column_no] = record.convergence[iteration]

    return table


def importance_table(record: RunRecord) -> Table:
    """
    Split-count ranking ("F-score"), largest first, ties by feature name.
    """
    table = Table(name=f"importance_{record.name}")
    table.insert_row(["feature", "splits"])
    ranking = sorted(record.split_counts.items(), key=lambda item: (-item[1], item[0]))
    for name, count in ranking:
        table.insert_row([name, count])
    return table


def best_of(records: Sequence[RunRecord], learner_name: str) -> RunRecord | None:
    candidates = [record for record in records if record.algorithm.learner_name == learner_name]
    try:
        return best_record(candidates)
    except ValueError:
        return None


def sensitivity_table(points: Sequence[SensitivityPoint]) -> Table:
    table = Table(name="sensitivity")
    table.insert_row(["size", "auc"])
    for point in points:
        table.insert_row([point.size, point.auc])
    return table


def tuned_vs_grid(records: Sequence[RunRecord]) -> dict[str, dict[str, float]]:
    """
    Median test AUC of every tuned algorithm against its grid counterpart,
    over the groups where both cells succeeded.
    """
    comparison: dict[str, dict[str, float]] = {}
    for algorithm in Algorithm:
        if not algorithm.tuned:
            continue
        grid = Algorithm(algorithm.learner_name)
        tuned_auc = {record.group: record.auc for record in records if record.algorithm == algorithm and record.auc is not None}
        grid_auc = {record.group: record.auc for record in records if record.algorithm == grid and record.auc is not None}
        shared = [group for group in tuned_auc if group in grid_auc]
        if not shared:
            continue
        comparison[algorithm.label] = {
            "cells": len(shared),
            "tuned_median": float(np.median([tuned_auc[group] for group in shared])),
            "grid_median": float(np.median([grid_auc[group] for group in shared])),
        }
    return comparison


def summary(records: Sequence[RunRecord], sensitivity: Sequence[SensitivityPoint] | None=None) -> dict[str, Any]:
    succeeded = [record for record in records if not record.failed]
    data: dict[str, Any] = {
        "cells": len(records),
        "failed": [record.name for record in records if record.failed],
    }
    if succeeded:
        best = best_record(records)
        data["best"] = {
            "group": best.group.value,
            "algorithm": best.algorithm.value,
            "metrics": best.metrics.row() if best.metrics else None,
            "best_params": best.best_params,
            "features": best.features,
        }
        data["tuned_vs_grid"] = tuned_vs_grid(records)
    if sensitivity:
        data["sensitivity_spread"] = auc_spread(sensitivity)
    return data


def emit_report(
        records: Sequence[RunRecord],
        output_dir: str | Path,
        groups: dict[SelectionMethod, SelectionResult] | None=None,
        sensitivity: Sequence[SensitivityPoint] | None=None,
        ods: bool=False) -> list[Table]:
    """
    Write the report bundle (csv tables, json summaries, report.md and
    optionally an ods workbook) and return the tables.
    """
    if not records:
        raise ValueError("no records to report")

    output = Path(output_dir)
    output.mkdir(parents=True, exist_ok=True)

    tables = [metrics_table(records)]
    tables += [metric_table(records, metric) for metric in METRIC_COLUMNS]

    for algorithm in Algorithm:
        table = params_table(records, algorithm)
        if table is not None:
            tables.append(table)

    if groups:
        table = selection_table(groups)
        table.name = "selection"
        tables.append(table)
        with open(output / "selection_summary.json", "w") as outfile:
            json.dump({method.value: result.report() for method, result in groups.items()}, outfile, indent=4)

    table = convergence_table(records)
    if table is not None:
        tables.append(table)

    best_gbt = best_of(records, "gbt")
    if best_gbt is not None:
        table = importance_table(best_gbt)
        table.name = "feature_importance"
        tables.append(table)

    if any(not record.failed for record in records):
        best = best_record(records)
        if best.algorithm.learner_name in TREE_LEARNERS and best is not best_gbt:
            table = importance_table(best)
            table.name = "feature_importance_best"
            tables.append(table)

    if sensitivity:
        tables.append(sensitivity_table(sensitivity))

    for table in tables:
        table.save_csv(output / f"{table.name}.csv")

    with open(output / "summary.json", "w") as outfile:
        json.dump(summary(records, sensitivity), outfile, indent=4)

    with open(output / "report.md", "w") as outfile:
        for table in tables:
            outfile.write(f"## {table.name}\n\n")
            outfile.write(table.get_markdown_table())
            outfile.write("\n")

    if ods:
        Table.save_tables(tables, output / "report.ods")

    logger.info(f"report: {len(tables)} tables written to {output}")
    return tables
