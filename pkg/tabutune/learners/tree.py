from __future__ import annotations

import logging
from typing import Any, Callable

import numpy as np

from tabutune.dataset import Dataset
from tabutune.learners.base import TrainedModel
from tabutune.metrics import DomainError

logger = logging.getLogger(__name__)

# (feature, threshold, score) of the best split of a node, None if the node stays a leaf
Split = tuple[int, float, float]
SplitFinder = Callable[[np.ndarray, np.random.Generator | None], Split | None]
LeafValue = Callable[[np.ndarray], float]


def gini(class_counts: np.ndarray | list[float] | tuple[float, ...]) -> float:
    counts = np.asarray(class_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise DomainError(f"negative class count: {counts}")
    total = counts.sum()
    if total <= 0:
        raise DomainError("gini of an empty node")

    fractions = counts / total
    return float(1 - np.sum(fractions**2))


class TreeStructure:
    """
    Flat binary tree. Rows with `x[feature] <= threshold` go left,
    leaves carry feature -1 and their prediction in `value`.
    """
    def __init__(self) -> None:
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.n_samples: list[int] = []

    def __json__(self) -> dict[str, Any]:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "n_samples": self.n_samples,
        }

    @classmethod
    def __from_json__(cls, **data: Any) -> TreeStructure:
        tree = cls()
        tree.feature = [int(x) for x in data["feature"]]
        tree.threshold = [float(x) for x in data["threshold"]]
        tree.left = [int(x) for x in data["left"]]
        tree.right = [int(x) for x in data["right"]]
        tree.value = [float(x) for x in data["value"]]
        tree.n_samples = [int(x) for x in data["n_samples"]]
        return tree

    def __len__(self) -> int:
        return len(self.feature)

    def add_leaf(self, value: float, n_samples: int) -> int:
        self.feature.append(-1)
        self.threshold.append(0.)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        self.n_samples.append(int(n_samples))
        return len(self.feature) - 1

    def set_split(self, node: int, feature: int, threshold: float, left: int, right: int) -> None:
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right

    @property
    def depth(self) -> int:
        depths = [0] * len(self)
        for node in range(len(self)):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return max(depths, default=0)

    def apply(self, rows: np.ndarray) -> np.ndarray:
        """
        Leaf index reached by every row.
        """
        feature = np.asarray(self.feature, dtype=np.int64)
        threshold = np.asarray(self.threshold, dtype=np.float64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)

        node = np.zeros(len(rows), dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            index = np.nonzero(active)[0]
            current = node[index]
            go_left = rows[index, feature[current]] <= threshold[current]
            node[index] = np.where(go_left, left[current], right[current])
            active[index] = feature[node[index]] >= 0

        return node

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return np.asarray(self.value, dtype=np.float64)[self.apply(rows)]

    def split_counts(self, n_features: int) -> np.ndarray:
        used = [feature for feature in self.feature if feature >= 0]
        return np.bincount(np.asarray(used, dtype=np.int64), minlength=n_features)


def split_positions(sorted_values: np.ndarray, min_leaf: int) -> np.ndarray:
    """
    Left-partition sizes that separate distinct values and leave at least
    `min_leaf` rows on both sides.
    """
    n = len(sorted_values)
    sizes = np.arange(1, n)
    valid = sorted_values[:-1] < sorted_values[1:]
    valid &= (sizes >= min_leaf) & (n - sizes >= min_leaf)
    return sizes[valid]


def midpoint(sorted_values: np.ndarray, size: int) -> float:
    low = sorted_values[size - 1]
    high = sorted_values[size]
    threshold = low + (high - low) / 2
    # adjacent floats: the midpoint rounds onto the upper value
    if threshold >= high:
        threshold = low
    return float(threshold)


def _candidate_features(n_features: int, max_features: int | None, rng: np.random.Generator | None) -> np.ndarray:
    if max_features is None or max_features >= n_features or rng is None:
        return np.arange(n_features)
    return np.sort(rng.choice(n_features, size=max_features, replace=False))


def grow_tree(
        rows: np.ndarray,
        find_split: SplitFinder,
        leaf_value: LeafValue,
        max_depth: int | None,
        min_samples_split: int=2,
        rng: np.random.Generator | None=None,
        on_split: Callable[[int, float], None] | None=None) -> TreeStructure:
    """
    Depth-first growth driven by a split finder. Nodes are expanded
    until the finder gives up or a structural limit is hit.
    """
    tree = TreeStructure()
    root = np.arange(len(rows))
    stack = [(tree.add_leaf(leaf_value(root), len(root)), root, 0)]

    while stack:
        node, indices, depth = stack.pop()
        if max_depth is not None and depth >= max_depth:
            continue
        if len(indices) < max(2, min_samples_split):
            continue

        split = find_split(indices, rng)
        if split is None:
            continue

        feature, threshold, score = split
        go_left = rows[indices, feature] <= threshold
        left_indices = indices[go_left]
        right_indices = indices[~go_left]

        left = tree.add_leaf(leaf_value(left_indices), len(left_indices))
        right = tree.add_leaf(leaf_value(right_indices), len(right_indices))
        tree.set_split(node, feature, threshold, left, right)
        if on_split is not None:
            on_split(feature, score)

        stack.append((right, right_indices, depth + 1))
        stack.append((left, left_indices, depth + 1))

    return tree


class GiniSplitter:
    """
    Exhaustive weighted-Gini split search over sorted feature columns.
    """
    def __init__(self, rows: np.ndarray, labels: np.ndarray, weights: np.ndarray, min_samples_leaf: int=1, max_features: int | None=None):
        self.rows = rows
        self.labels = labels.astype(np.float64)
        self.weights = weights
        self.min_samples_leaf = max(1, min_samples_leaf)
        self.max_features = max_features

    def leaf_value(self, indices: np.ndarray) -> float:
        total = self.weights[indices].sum()
        if total <= 0:
            return float(self.labels[indices].mean()) if len(indices) else 0.5
        return float(np.sum(self.weights[indices] * self.labels[indices]) / total)

    def __call__(self, indices: np.ndarray, rng: np.random.Generator | None) -> Split | None:
        weights = self.weights[indices]
        positives = weights * self.labels[indices]
        total = weights.sum()
        total_positive = positives.sum()
        if total <= 0:
            return None

        parent = total - (total_positive**2 + (total - total_positive)**2) / total
        if parent <= 1e-12 * total:
            return None

        best: Split | None = None
        for feature in _candidate_features(self.rows.shape[1], self.max_features, rng):
            column = self.rows[indices, feature]
            order = np.argsort(column, kind="stable")
            sorted_values = column[order]
            sizes = split_positions(sorted_values, self.min_samples_leaf)
            if len(sizes) == 0:
                continue

            cum_weight = np.cumsum(weights[order])[sizes - 1]
            cum_positive = np.cumsum(positives[order])[sizes - 1]
            right_weight = total - cum_weight
            right_positive = total_positive - cum_positive

            with np.errstate(divide="ignore", invalid="ignore"):
                left_term = np.where(cum_weight > 0, (cum_positive**2 + (cum_weight - cum_positive)**2) / cum_weight, 0.)
                right_term = np.where(right_weight > 0, (right_positive**2 + (right_weight - right_positive)**2) / right_weight, 0.)

            # parent impurity minus both children, all weighted by node mass
            decrease = left_term + right_term - (total_positive**2 + (total - total_positive)**2) / total
            position = int(np.argmax(decrease))
            score = max(float(decrease[position]), 0.)

            if best is None or score > best[2]:
                best = (int(feature), midpoint(sorted_values, int(sizes[position])), score)

        return best


class DecisionTreeModel(TrainedModel):
    kind = "tree"

    def __init__(self, tree: TreeStructure, n_features: int, importances: np.ndarray | list[float] | None=None, feature_names: list[str] | None=None):
        super().__init__(n_features, feature_names)
        self.tree = tree
        if importances is None:
            importances = np.zeros(n_features)
        self.importances = np.asarray(importances, dtype=np.float64)

    def __json__(self) -> dict[str, Any]:
        data = self._base_json()
        data.update({
            "tree": self.tree,
            "importances": self.importances.tolist(),
        })
        return data

    @classmethod
    def __from_json__(cls, **data: Any) -> DecisionTreeModel:
        return cls(**data)

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        return self.tree.predict(rows)

    def split_counts(self) -> np.ndarray:
        return self.tree.split_counts(self.n_features)


def fit_tree_arrays(
        rows: np.ndarray,
        labels: np.ndarray,
        sample_weights: np.ndarray | None=None,
        max_depth: int | None=None,
        min_samples_split: int=2,
        min_samples_leaf: int=1,
        max_features: int | None=None,
        rng: np.random.Generator | None=None,
        feature_names: list[str] | None=None) -> DecisionTreeModel:
    n_features = rows.shape[1]
    if sample_weights is None:
        sample_weights = np.ones(len(rows))
    sample_weights = np.asarray(sample_weights, dtype=np.float64)
    if len(sample_weights) != len(rows):
        raise ValueError(f"{len(sample_weights)} weights for {len(rows)} rows")
    if np.any(sample_weights < 0) or sample_weights.sum() <= 0:
        raise ValueError("sample weights must be non-negative with a positive sum")

    splitter = GiniSplitter(rows, labels, sample_weights, min_samples_leaf, max_features)
    decrease = np.zeros(n_features)

    def record(feature: int, score: float) -> None:
        decrease[feature] += score

    tree = grow_tree(rows, splitter, splitter.leaf_value, max_depth, min_samples_split, rng, record)

    total = decrease.sum()
    importances = decrease / total if total > 0 else decrease

    return DecisionTreeModel(tree, n_features, importances, feature_names)


def fit_tree(
        train: Dataset,
        sample_weights: np.ndarray | None=None,
        max_depth: int | None=None,
        min_samples_split: int=2,
        min_samples_leaf: int=1,
        max_features: int | None=None,
        seed: int=0) -> DecisionTreeModel:
    """
    CART classification tree with the weighted Gini criterion.
    Degenerate data (one class, no admissible split) gives a single leaf.
    """
    rng = np.random.default_rng(seed) if max_features is not None else None
    return fit_tree_arrays(
        train.values(), train.labels, sample_weights,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        min_samples_leaf=min_samples_leaf,
        max_features=max_features,
        rng=rng,
        feature_names=train.feature_names,
    )
