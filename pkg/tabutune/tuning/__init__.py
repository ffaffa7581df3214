from tabutune.tuning.space import (
    PRESETS, ParamKind, ParamSpace, ParamSpec, ParamVector,
    adab_space, gbt_space, init_solution, mlp_space, neighbor, repair_bounds, space_for,
)
from tabutune.tuning.tabu import EvaluationError, TabuState, TraceRecord, TsConfig, TsResult, ts_optimize
from tabutune.tuning.grid import BudgetError, GridResult, grid_search, points_for_budget
from tabutune.tuning.objective import FAILED_AUC, AucObjective, make_objective

__all__ = [
    "PRESETS", "ParamKind", "ParamSpace", "ParamSpec", "ParamVector",
    "adab_space", "gbt_space", "init_solution", "mlp_space", "neighbor", "repair_bounds", "space_for",
    "EvaluationError", "TabuState", "TraceRecord", "TsConfig", "TsResult", "ts_optimize",
    "BudgetError", "GridResult", "grid_search", "points_for_budget",
    "FAILED_AUC", "AucObjective", "make_objective",
]
