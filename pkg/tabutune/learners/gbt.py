from __future__ import annotations

import logging
from typing import Any

import numpy as np
from scipy.special import expit

from tabutune.dataset import Dataset
from tabutune.learners.base import Learner, TrainedModel, check_binary
from tabutune.learners.params import GbtParams
from tabutune.learners.tree import Split, TreeStructure, grow_tree, midpoint, split_positions

logger = logging.getLogger(__name__)

REG_LAMBDA = 1.
# minimum hessian mass per child, the usual library default
MIN_CHILD_WEIGHT = 1.
SUBSAMPLE = 0.8


def log_loss(labels: np.ndarray, raw: np.ndarray) -> float:
    """
    Mean logistic loss of raw (log-odds) predictions.
    """
    return float(np.mean(np.logaddexp(0., raw) - labels * raw))


def leaf_weight(grad_sum: float, hess_sum: float, max_delta_step: float=0, reg_lambda: float=REG_LAMBDA) -> float:
    weight = -grad_sum / (hess_sum + reg_lambda)
    if max_delta_step > 0:
        weight = float(np.clip(weight, -max_delta_step, max_delta_step))
    return float(weight)


def split_gain(grad_left: np.ndarray, hess_left: np.ndarray, grad_sum: float, hess_sum: float, gamma: float, reg_lambda: float=REG_LAMBDA) -> np.ndarray:
    grad_right = grad_sum - grad_left
    hess_right = hess_sum - hess_left
    gain = grad_left**2 / (hess_left + reg_lambda)
    gain = gain + grad_right**2 / (hess_right + reg_lambda)
    gain = gain - grad_sum**2 / (hess_sum + reg_lambda)
    return 0.5 * gain - gamma


class GradientSplitter:
    """
    Second-order split search: a split is taken only if its gain beats gamma.
    """
    def __init__(self, rows: np.ndarray, grad: np.ndarray, hess: np.ndarray, gamma: float, max_delta_step: float, min_child_weight: float=MIN_CHILD_WEIGHT):
        self.rows = rows
        self.grad = grad
        self.hess = hess
        self.gamma = gamma
        self.max_delta_step = max_delta_step
        self.min_child_weight = min_child_weight

    def leaf_value(self, indices: np.ndarray) -> float:
        return leaf_weight(self.grad[indices].sum(), self.hess[indices].sum(), self.max_delta_step)

    def __call__(self, indices: np.ndarray, rng: np.random.Generator | None) -> Split | None:
        grad = self.grad[indices]
        hess = self.hess[indices]
        grad_sum = grad.sum()
        hess_sum = hess.sum()

        best: Split | None = None
        for feature in range(self.rows.shape[1]):
            column = self.rows[indices, feature]
            order = np.argsort(column, kind="stable")
            sorted_values = column[order]
            sizes = split_positions(sorted_values, 1)
            if len(sizes) == 0:
                continue

            grad_left = np.cumsum(grad[order])[sizes - 1]
            hess_left = np.cumsum(hess[order])[sizes - 1]
            admissible = (hess_left >= self.min_child_weight) & (hess_sum - hess_left >= self.min_child_weight)
            if not admissible.any():
                continue

            gain = np.where(admissible, split_gain(grad_left, hess_left, grad_sum, hess_sum, self.gamma), -np.inf)
            position = int(np.argmax(gain))
            score = float(gain[position])

            if score > 0 and (best is None or score > best[2]):
                best = (feature, midpoint(sorted_values, int(sizes[position])), score)

        return best


class GbtModel(TrainedModel):
    kind = "gbt"

    def __init__(self, params: GbtParams, rounds: list[list[TreeStructure]], n_features: int, feature_names: list[str] | None=None, train_loss: list[float] | None=None):
        super().__init__(n_features, feature_names)
        self.params = params
        self.rounds = rounds
        self.train_loss = train_loss or []

    def __json__(self) -> dict[str, Any]:
        data = self._base_json()
        data.update({
            "params": self.params,
            "rounds": self.rounds,
            "train_loss": self.train_loss,
        })
        return data

    @classmethod
    def __from_json__(cls, **data: Any) -> GbtModel:
        return cls(**data)

    @staticmethod
    def round_output(trees: list[TreeStructure], rows: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict(rows) for tree in trees], axis=0)

    def raw(self, rows: np.ndarray) -> np.ndarray:
        raw = np.zeros(len(rows))
        for trees in self.rounds:
            raw += self.params.learning_rate * self.round_output(trees, rows)
        return raw

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return expit(self.raw(rows))

    def split_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_features, dtype=np.int64)
        for trees in self.rounds:
            for tree in trees:
                counts += tree.split_counts(self.n_features)
        return counts


def fit_gbt(train: Dataset, params: GbtParams, seed: int=0) -> GbtModel:
    """
    Gradient-boosted trees on the logistic loss, starting from probability 0.5.
    """
    check_binary(train, "gbt")
    rows = train.values()
    labels = train.labels.astype(np.float64)
    rng = np.random.default_rng(seed)

    n_trees = max(1, params.n_parallel_trees)
    subsample_size = max(1, int(round(SUBSAMPLE * train.n)))

    raw = np.zeros(train.n)
    rounds: list[list[TreeStructure]] = []
    train_loss = [log_loss(labels, raw)]

    for _ in range(params.n_estimators):
        probabilities = expit(raw)
        grad = probabilities - labels
        hess = probabilities * (1 - probabilities)

        trees = []
        for _ in range(n_trees):
            if n_trees > 1:
                subset = np.sort(rng.choice(train.n, size=subsample_size, replace=False))
            else:
                subset = np.arange(train.n)
            splitter = GradientSplitter(rows[subset], grad[subset], hess[subset], params.gamma, params.max_delta_step)
            trees.append(grow_tree(rows[subset], splitter, splitter.leaf_value, params.max_depth))

        rounds.append(trees)
        raw = raw + params.learning_rate * GbtModel.round_output(trees, rows)
        train_loss.append(log_loss(labels, raw))

    logger.debug(f"gbt: {len(rounds)} rounds, train loss {train_loss[0]:.4f} -> {train_loss[-1]:.4f}")

    return GbtModel(params, rounds, train.n_features, train.feature_names, train_loss)


class GbtLearner(Learner[GbtParams]):
    name = "gbt"
    params_type = GbtParams

    def fit(self, train: Dataset, params: GbtParams, seed: int=0) -> GbtModel:
        return fit_gbt(train, params, seed)
