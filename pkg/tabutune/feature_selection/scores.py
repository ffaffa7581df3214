from __future__ import annotations

import logging
import math

import numpy as np
import pandas
from scipy.special import expit

from tabutune.dataset import Dataset
from tabutune.learners import FitError, fit_tree_arrays
from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)

LASSO_TOLERANCE = 1e-6
LASSO_MAX_ITERATIONS = 10000


def discretize(column: np.ndarray, bins: int) -> np.ndarray:
    """
    Equal-frequency interval index per value. Columns with at most `bins`
    distinct values keep one interval per value.
    """
    distinct = np.unique(column)
    if len(distinct) <= bins:
        return np.searchsorted(distinct, column)
    return pandas.qcut(column, q=bins, labels=False, duplicates="drop").astype(np.int64)


def chi_square_statistic(intervals: np.ndarray, labels: np.ndarray) -> float:
    observed = pandas.crosstab(intervals, labels).to_numpy(dtype=np.float64)
    total = observed.sum()
    expected = observed.sum(axis=1, keepdims=True) * observed.sum(axis=0, keepdims=True) / total
    cells = expected > 0
    return float(np.sum((observed[cells] - expected[cells])**2 / expected[cells]))


def chi_square_scores(dataset: Dataset, bins: int=5) -> np.ndarray:
    """
    Chi-square statistic of every feature against the label. Categorical
    codes are used as they are, numeric features are binned first.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    rows = dataset.values()
    categorical = dataset.categorical_mask

    scores = np.zeros(dataset.n_features)
    for index in range(dataset.n_features):
        column = rows[:, index]
        intervals = column.astype(np.int64) if categorical[index] else discretize(column, bins)
        scores[index] = chi_square_statistic(intervals, dataset.labels)

    return scores


class LassoFit(BaseModel):
    coefficients: list[float]
    intercept: float
    lam: float
    iterations: int
    converged: bool

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(np.asarray(self.coefficients))


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.)


def fit_lasso_logistic(dataset: Dataset, lam: float=0.01, tolerance: float=LASSO_TOLERANCE, max_iterations: int=LASSO_MAX_ITERATIONS) -> LassoFit:
    """
    L1-penalized logistic regression (mean log-loss + lam * |beta|_1) by
    proximal gradient descent; the intercept is not penalized.
    """
    if lam < 0:
        raise ValueError(f"negative lasso penalty: {lam}")
    rows = dataset.values()
    labels = dataset.labels.astype(np.float64)
    n = dataset.n

    # the logistic loss gradient is Lipschitz with 1/4 * |[1 X]|^2 / n
    design = np.hstack([np.ones((n, 1)), rows])
    lipschitz = 0.25 * np.linalg.norm(design, ord=2)**2 / n
    step = 1 / lipschitz

    coefficients = np.zeros(dataset.n_features)
    intercept = 0.
    converged = False
    iteration = 0

    for iteration in range(1, max_iterations + 1):
        residual = expit(rows @ coefficients + intercept) - labels
        gradient = rows.T @ residual / n
        new_intercept = intercept - step * residual.mean()
        new_coefficients = soft_threshold(coefficients - step * gradient, step * lam)

        change = max(np.max(np.abs(new_coefficients - coefficients), initial=0.), abs(new_intercept - intercept))
        coefficients = new_coefficients
        intercept = new_intercept
        if change < tolerance:
            converged = True
            break

    if not converged:
        logger.warning(f"lasso (lam={lam}) did not converge in {max_iterations} iterations")

    return LassoFit(
        coefficients=coefficients.tolist(),
        intercept=float(intercept),
        lam=lam,
        iterations=iteration,
        converged=converged
    )


def dt_importance(dataset: Dataset) -> np.ndarray:
    """
    Normalized Gini importance of a fully grown tree.
    """
    tree = fit_tree_arrays(dataset.values(), dataset.labels, feature_names=dataset.feature_names)
    return tree.importances


def rf_importance(dataset: Dataset, n_trees: int=50, seed: int=0) -> np.ndarray:
    """
    Out-of-bag permutation importance of a random forest as z-scores:
    mean accuracy drop over trees divided by its standard error.
    """
    negatives, positives = dataset.class_counts
    if negatives == 0 or positives == 0:
        raise FitError("random forest: training data holds a single class")
    if n_trees < 1:
        raise ValueError(f"need at least one tree, got {n_trees}")

    rows = dataset.values()
    labels = dataset.labels
    n, n_features = rows.shape
    max_features = max(1, int(math.sqrt(n_features)))
    rng = np.random.default_rng(seed)

    drops = np.zeros((n_trees, n_features))
    for tree_no in range(n_trees):
        sample = rng.integers(0, n, size=n)
        out_of_bag = np.setdiff1d(np.arange(n), sample)
        tree = fit_tree_arrays(rows[sample], labels[sample], max_features=max_features, rng=rng)
        if len(out_of_bag) == 0:
            continue

        oob_rows = rows[out_of_bag]
        oob_labels = labels[out_of_bag]
        baseline = np.mean((tree.predict_proba(oob_rows) >= 0.5) == oob_labels)
        for feature in range(n_features):
            permuted = oob_rows.copy()
            permuted[:, feature] = rng.permutation(permuted[:, feature])
            accuracy = np.mean((tree.predict_proba(permuted) >= 0.5) == oob_labels)
            drops[tree_no, feature] = baseline - accuracy

    mean = drops.mean(axis=0)
    if n_trees == 1:
        logger.warning("random forest importance with one tree: reporting raw mean accuracy drop")
        return mean

    spread = drops.std(axis=0, ddof=1)
    z_scores = np.zeros(n_features)
    nonzero = spread > 0
    z_scores[nonzero] = mean[nonzero] / (spread[nonzero] / math.sqrt(n_trees))
    return z_scores
