from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from scipy.special import expit

from tabutune.dataset import Dataset
from tabutune.learners.base import Learner, TrainedModel, check_binary
from tabutune.learners.params import AdabParams
from tabutune.learners.tree import DecisionTreeModel, fit_tree_arrays

logger = logging.getLogger(__name__)

# a perfect round still gets a finite vote
MIN_ERROR = 1e-10


def adaboost_alpha(error: float, learning_rate: float) -> float:
    error = min(max(error, MIN_ERROR), 1 - MIN_ERROR)
    return learning_rate * 0.5 * math.log((1 - error) / error)


def _vote(model: DecisionTreeModel, rows: np.ndarray) -> np.ndarray:
    return np.where(model.predict_proba(rows) >= 0.5, 1., -1.)


class AdaBoostModel(TrainedModel):
    kind = "adab"

    def __init__(self, params: AdabParams, learners: list[DecisionTreeModel], alphas: list[float], errors: list[float], n_features: int, feature_names: list[str] | None=None):
        super().__init__(n_features, feature_names)
        self.params = params
        self.learners = learners
        self.alphas = [float(alpha) for alpha in alphas]
        self.errors = [float(error) for error in errors]

    def __json__(self) -> dict[str, Any]:
        data = self._base_json()
        data.update({
            "params": self.params,
            "learners": self.learners,
            "alphas": self.alphas,
            "errors": self.errors,
        })
        return data

    @classmethod
    def __from_json__(cls, **data: Any) -> AdaBoostModel:
        return cls(**data)

    def margin(self, rows: np.ndarray) -> np.ndarray:
        margin = np.zeros(len(rows))
        for alpha, learner in zip(self.alphas, self.learners):
            margin += alpha * _vote(learner, rows)
        return margin

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return expit(self.margin(rows))

    def split_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_features, dtype=np.int64)
        for learner in self.learners:
            counts += learner.split_counts()
        return counts


def fit_adaboost(train: Dataset, params: AdabParams, seed: int=0) -> AdaBoostModel:
    """
    Discrete two-class AdaBoost over CART trees. Rounds stop early once a
    tree is no better than chance on its weights or fits them perfectly.
    """
    check_binary(train, "adaboost")
    rows = train.values()
    signs = np.where(train.labels == 1, 1., -1.)
    weights = np.full(train.n, 1 / train.n)

    learners: list[DecisionTreeModel] = []
    alphas: list[float] = []
    errors: list[float] = []

    for round_no in range(params.n_estimators):
        tree = fit_tree_arrays(
            rows, train.labels, weights,
            max_depth=params.base_max_depth,
            min_samples_split=params.base_min_samples_split,
            min_samples_leaf=params.base_min_samples_leaf,
            feature_names=train.feature_names,
        )
        wrong = _vote(tree, rows) != signs
        error = float(weights[wrong].sum() / weights.sum())

        if error >= 0.5:
            logger.debug(f"adaboost round {round_no}: error {error:.4f} >= 0.5, stopping")
            break

        alpha = adaboost_alpha(error, params.learning_rate)
        learners.append(tree)
        alphas.append(alpha)
        errors.append(error)

        if error == 0:
            logger.debug(f"adaboost round {round_no}: training data separated, stopping")
            break

        weights = np.where(wrong, weights * math.exp(alpha), weights)
        weights /= weights.sum()

    if not learners:
        logger.warning("adaboost: first tree no better than chance, scores fall back to 0.5")

    return AdaBoostModel(params, learners, alphas, errors, train.n_features, train.feature_names)


class AdaBoostLearner(Learner[AdabParams]):
    name = "adab"
    params_type = AdabParams

    def fit(self, train: Dataset, params: AdabParams, seed: int=0) -> AdaBoostModel:
        return fit_adaboost(train, params, seed)
