from __future__ import annotations

import logging
from typing import Callable

import numpy as np
import pydantic

from tabutune.dataset import Dataset
from tabutune.feature_selection.scores import chi_square_scores, dt_importance, fit_lasso_logistic, rf_importance
from tabutune.feature_selection.strategies import (
    VOTING_METHODS, RfeRanker, SelectionMethod, SelectionResult,
    all_features, rfe, select_from_model, select_k_best, voting_group,
)
from tabutune.utils import derive_seed
from tabutune.utils.dataclass import BaseModel, Field
from tabutune.utils.queue import AsyncTaskQueue
from tabutune.utils.table import Table

logger = logging.getLogger(__name__)


class SelectionConfig(BaseModel):
    chi_bins: int = pydantic.Field(5, ge=2)
    k_best: int = pydantic.Field(10, ge=1)
    lasso_lambda: float = pydantic.Field(0.01, ge=0)
    rf_trees: int = pydantic.Field(50, ge=1)
    rfe_keep: dict[RfeRanker, int] = Field(default_factory=lambda: {
        RfeRanker.dt: 10,
        RfeRanker.rf: 11,
        RfeRanker.lasso: 10,
    })
    rfe_step: int = pydantic.Field(1, ge=1)
    min_votes: int = pydantic.Field(4, ge=1, le=7)


def _clamp(count: int, n_features: int, what: str) -> int:
    if count > n_features:
        logger.warning(f"{what}={count} exceeds the {n_features} features, keeping all")
        return n_features
    return count


def build_method_groups(tree_data: Dataset, scaled_data: Dataset, config: SelectionConfig | None=None, seed: int=0, workers: int=1) -> dict[SelectionMethod, SelectionResult]:
    """
    The seven single-method groups. Tree rankers and chi-square see the
    unscaled data, Lasso sees the min-max scaled copy of the same rows.
    """
    config = config or SelectionConfig()
    if tree_data.feature_names != scaled_data.feature_names or tree_data.n != scaled_data.n:
        raise ValueError("tree and scaled data must hold the same rows and features")

    names = tree_data.feature_names
    p = tree_data.n_features

    def keep(ranker: RfeRanker) -> int:
        return _clamp(config.rfe_keep.get(ranker, p), p, f"rfe n_keep ({ranker.value})")

    def rf_seed(method: SelectionMethod) -> int:
        return derive_seed(seed, "selection", method.value)

    jobs: dict[SelectionMethod, Callable[[], SelectionResult]] = {
        SelectionMethod.lasso_sfm: lambda: select_from_model(
            fit_lasso_logistic(scaled_data, config.lasso_lambda).magnitudes, SelectionMethod.lasso_sfm, names),
        SelectionMethod.dt_sfm: lambda: select_from_model(
            dt_importance(tree_data), SelectionMethod.dt_sfm, names),
        # z-scores below zero carry no importance
        SelectionMethod.rf_sfm: lambda: select_from_model(
            np.maximum(rf_importance(tree_data, config.rf_trees, rf_seed(SelectionMethod.rf_sfm)), 0.), SelectionMethod.rf_sfm, names),
        SelectionMethod.chi_skb: lambda: select_k_best(
            chi_square_scores(tree_data, config.chi_bins), _clamp(config.k_best, p, "k_best"), SelectionMethod.chi_skb, names),
        SelectionMethod.dt_rfe: lambda: rfe(
            tree_data, RfeRanker.dt, keep(RfeRanker.dt), config.rfe_step),
        SelectionMethod.rf_rfe: lambda: rfe(
            tree_data, RfeRanker.rf, keep(RfeRanker.rf), config.rfe_step,
            rf_trees=config.rf_trees, seed=rf_seed(SelectionMethod.rf_rfe)),
        SelectionMethod.lasso_rfe: lambda: rfe(
            scaled_data, RfeRanker.lasso, keep(RfeRanker.lasso), config.rfe_step, lasso_lambda=config.lasso_lambda),
    }

    results = AsyncTaskQueue(workers).map([jobs[method] for method in VOTING_METHODS])
    return dict(zip(VOTING_METHODS, results))


def build_groups(tree_data: Dataset, scaled_data: Dataset, config: SelectionConfig | None=None, seed: int=0, workers: int=1) -> dict[SelectionMethod, SelectionResult]:
    """
    All nine groups: the seven methods, their vote and the full feature set.
    """
    config = config or SelectionConfig()
    groups = build_method_groups(tree_data, scaled_data, config, seed, workers)
    groups[SelectionMethod.voting] = voting_group(list(groups.values()), config.min_votes)
    groups[SelectionMethod.all] = all_features(tree_data)

    for method, result in groups.items():
        logger.info(f"{method.value}: {len(result.selected)} features ({', '.join(result.selected_names)})")

    return groups


def selection_table(groups: dict[SelectionMethod, SelectionResult]) -> Table:
    """
    Feature-by-method selection matrix with the vote total of the seven
    methods, most selected features first.
    """
    names = next(iter(groups.values())).feature_names
    columns = [method for method in SelectionMethod if method in groups and method != SelectionMethod.all]

    totals = np.zeros(len(names), dtype=np.int64)
    for method in VOTING_METHODS:
        if method in groups:
            totals[groups[method].selected] += 1
    order = np.lexsort((np.arange(len(names)), -totals))

    table = Table(name="feature_selection")
    table.insert_row(["feature"] + [method.value for method in columns] + ["total"])
    for row_no, feature in enumerate(order, start=1):
        table[row_no, 0] = names[feature]
        for column_no, method in enumerate(columns, start=1):
            table[row_no, column_no] = "x" if feature in groups[method].selected else ""
        table[row_no, len(columns) + 1] = int(totals[feature])

    return table
