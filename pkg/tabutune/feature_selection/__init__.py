from tabutune.feature_selection.scores import (
    LassoFit, chi_square_scores, discretize, dt_importance,
    fit_lasso_logistic, rf_importance, soft_threshold,
)
from tabutune.feature_selection.strategies import (
    VOTING_METHODS, RfeRanker, SelectionError, SelectionMethod, SelectionResult,
    all_features, rfe, select_from_model, select_k_best, voting_group,
)
from tabutune.feature_selection.groups import SelectionConfig, build_groups, build_method_groups, selection_table

__all__ = [
    "LassoFit", "chi_square_scores", "discretize", "dt_importance",
    "fit_lasso_logistic", "rf_importance", "soft_threshold",
    "VOTING_METHODS", "RfeRanker", "SelectionError", "SelectionMethod", "SelectionResult",
    "all_features", "rfe", "select_from_model", "select_k_best", "voting_group",
    "SelectionConfig", "build_groups", "build_method_groups", "selection_table",
]
