from __future__ import annotations

import enum
import logging
from typing import Any, Callable, Sequence

import numpy as np
import pydantic
from typing_extensions import Self

from tabutune.dataset import Dataset, SizeError
from tabutune.feature_selection.scores import dt_importance, fit_lasso_logistic, rf_importance
from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)


class SelectionError(ValueError):
    pass


class SelectionMethod(str, enum.Enum):
    lasso_sfm = "lasso_sfm"
    dt_sfm = "dt_sfm"
    rf_sfm = "rf_sfm"
    chi_skb = "chi_skb"
    dt_rfe = "dt_rfe"
    rf_rfe = "rf_rfe"
    lasso_rfe = "lasso_rfe"
    voting = "voting"
    all = "all"


VOTING_METHODS = (
    SelectionMethod.lasso_sfm,
    SelectionMethod.dt_sfm,
    SelectionMethod.rf_sfm,
    SelectionMethod.chi_skb,
    SelectionMethod.dt_rfe,
    SelectionMethod.rf_rfe,
    SelectionMethod.lasso_rfe,
)


class RfeRanker(str, enum.Enum):
    dt = "dt"
    rf = "rf"
    lasso = "lasso"


class SelectionResult(BaseModel):
    method: SelectionMethod
    selected: list[int]
    scores: list[float]
    feature_names: list[str] = Field(default_factory=list)

    @pydantic.model_validator(mode="after")
    def _check_selected(self) -> Self:
        if not self.selected:
            raise ValueError(f"{self.method.value}: no feature selected")
        if len(set(self.selected)) != len(self.selected):
            raise ValueError(f"{self.method.value}: duplicate feature index")
        if min(self.selected) < 0 or max(self.selected) >= len(self.scores):
            raise ValueError(f"{self.method.value}: feature index out of range")
        self.selected = sorted(self.selected)
        return self

    @property
    def selected_names(self) -> list[str]:
        if not self.feature_names:
            return [f"f{index}" for index in self.selected]
        return [self.feature_names[index] for index in self.selected]

    def report(self) -> dict[str, Any]:
        return {
            "method": self.method.value,
            "selected_names": self.selected_names,
            "scores": self.scores,
        }

    def apply(self, dataset: Dataset) -> Dataset:
        return dataset.select_features(self.selected)


def select_k_best(scores: Sequence[float] | np.ndarray, k: int, method: SelectionMethod=SelectionMethod.chi_skb, feature_names: list[str] | None=None) -> SelectionResult:
    """
    Top-k features by score, ties going to the lower index.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not 1 <= k <= len(scores):
        raise SizeError(f"k={k} outside [1, {len(scores)}]")

    order = np.lexsort((np.arange(len(scores)), -scores))
    return SelectionResult(
        method=method,
        selected=[int(index) for index in order[:k]],
        scores=scores.tolist(),
        feature_names=feature_names or []
    )


def select_from_model(importances: Sequence[float] | np.ndarray, method: SelectionMethod, feature_names: list[str] | None=None) -> SelectionResult:
    """
    Keep the features whose importance reaches the mean importance.
    """
    importances = np.asarray(importances, dtype=np.float64)
    if np.any(importances < 0):
        raise ValueError(f"{method.value}: negative importance")

    threshold = importances.mean()
    # all-equal importances must survive the rounding of the mean
    tolerance = 1e-12 * max(1., abs(threshold))
    selected = np.flatnonzero(importances >= threshold - tolerance)

    return SelectionResult(
        method=method,
        selected=[int(index) for index in selected],
        scores=importances.tolist(),
        feature_names=feature_names or []
    )


def _ranker(ranker: RfeRanker, lasso_lambda: float, rf_trees: int, seed: int) -> Callable[[Dataset], np.ndarray]:
    if ranker == RfeRanker.dt:
        return dt_importance
    if ranker == RfeRanker.rf:
        return lambda dataset: rf_importance(dataset, rf_trees, seed)
    return lambda dataset: fit_lasso_logistic(dataset, lasso_lambda).magnitudes


RFE_METHODS = {
    RfeRanker.dt: SelectionMethod.dt_rfe,
    RfeRanker.rf: SelectionMethod.rf_rfe,
    RfeRanker.lasso: SelectionMethod.lasso_rfe,
}


def rfe(dataset: Dataset, ranker: RfeRanker | str, n_keep: int, step: int=1, lasso_lambda: float=0.01, rf_trees: int=50, seed: int=0) -> SelectionResult:
    """
    Recursive elimination: refit the ranker on the remaining features and
    drop the `step` weakest until `n_keep` are left. A feature's score is
    the number of fits it survived.
    """
    ranker = RfeRanker(ranker)
    if not 1 <= n_keep <= dataset.n_features:
        raise SizeError(f"n_keep={n_keep} outside [1, {dataset.n_features}]")
    if step < 1:
        raise ValueError(f"rfe step must be positive: {step}")

    rank = _ranker(ranker, lasso_lambda, rf_trees, seed)
    remaining = list(range(dataset.n_features))
    survived = np.zeros(dataset.n_features)

    while len(remaining) > n_keep:
        importances = np.asarray(rank(dataset.select_features(remaining)))
        survived[remaining] += 1

        n_drop = min(step, len(remaining) - n_keep)
        # weakest first, later index first among equals
        order = np.lexsort((-np.arange(len(remaining)), importances))
        dropped = {remaining[int(position)] for position in order[:n_drop]}
        remaining = [index for index in remaining if index not in dropped]
        logger.debug(f"rfe {ranker.value}: dropped {sorted(dropped)}, {len(remaining)} left")

    survived[remaining] += 1

    return SelectionResult(
        method=RFE_METHODS[ranker],
        selected=remaining,
        scores=survived.tolist(),
        feature_names=dataset.feature_names
    )


def voting_group(results: Sequence[SelectionResult], min_votes: int=4) -> SelectionResult:
    """
    Features picked by at least `min_votes` of the seven selection methods.
    """
    methods = sorted(result.method.value for result in results)
    if methods != sorted(method.value for method in VOTING_METHODS):
        raise ValueError(f"voting needs one result per selection method, got {methods}")

    n_features = len(results[0].scores)
    votes = np.zeros(n_features)
    for result in results:
        if len(result.scores) != n_features:
            raise ValueError("selection results disagree on the feature count")
        votes[result.selected] += 1

    selected = np.flatnonzero(votes >= min_votes)
    if len(selected) == 0:
        raise SelectionError(f"no feature reached {min_votes} votes")

    return SelectionResult(
        method=SelectionMethod.voting,
        selected=[int(index) for index in selected],
        scores=votes.tolist(),
        feature_names=results[0].feature_names
    )


def all_features(dataset: Dataset) -> SelectionResult:
    return SelectionResult(
        method=SelectionMethod.all,
        selected=list(range(dataset.n_features)),
        scores=[1.] * dataset.n_features,
        feature_names=dataset.feature_names
    )
