from tabutune.experiment.config import Algorithm, ExperimentConfig, SynthConfig
from tabutune.experiment.pipeline import PreparedData, Route, load_source, prepare, select_groups, split
from tabutune.experiment.report import emit_report, metrics_table, params_table, selection_table, tuned_vs_grid
from tabutune.experiment.runner import (
    RunRecord, SensitivityPoint, auc_spread, best_record, cell_seed, fit_and_evaluate,
    load_records, load_selection, read_trace, run_cell, run_matrix,
    save_records, save_selection, sensitivity_analysis,
)

__all__ = [
    "Algorithm", "ExperimentConfig", "SynthConfig",
    "PreparedData", "Route", "load_source", "prepare", "select_groups", "split",
    "emit_report", "metrics_table", "params_table", "selection_table", "tuned_vs_grid",
    "RunRecord", "SensitivityPoint", "auc_spread", "best_record", "cell_seed", "fit_and_evaluate",
    "load_records", "load_selection", "read_trace", "run_cell", "run_matrix",
    "save_records", "save_selection", "sensitivity_analysis",
]
