from __future__ import annotations

import logging

import numpy as np
import pydantic
from scipy.spatial import cKDTree

from tabutune.dataset import Dataset
from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)


class ResampleError(ValueError):
    pass


class SmoteConfig(BaseModel):
    k_neighbors: int = pydantic.Field(5, ge=1)
    target_ratio: float = pydantic.Field(1., gt=0, le=1)
    seed: int = 0


def _neighbor_space(rows: np.ndarray, categorical: np.ndarray) -> np.ndarray:
    """
    Min-max scaled numeric coordinates used for the neighbor search;
    all coordinates when the data has no numeric feature.
    """
    if categorical.all():
        columns = rows
    else:
        columns = rows[:, ~categorical]
    low = columns.min(axis=0)
    span = columns.max(axis=0) - low
    span[span == 0] = 1.
    return (columns - low) / span


def smote(train: Dataset, config: SmoteConfig | None=None) -> Dataset:
    """
    Append synthetic minority rows until minority/majority reaches the
    target ratio. Original rows come first and are left untouched.
    """
    config = config or SmoteConfig()
    rows = train.values()
    if np.isnan(rows).any():
        raise ResampleError("smote needs complete data, impute first")

    negatives, positives = train.class_counts
    minority_label = 1 if positives < negatives else 0
    minority_count = min(negatives, positives)
    majority_count = max(negatives, positives)

    wanted = int(round(config.target_ratio * majority_count))
    n_synthetic = wanted - minority_count
    if n_synthetic <= 0:
        logger.debug(f"smote: minority {minority_count} already at ratio {config.target_ratio}")
        return train

    if minority_count < config.k_neighbors + 1:
        raise ResampleError(f"smote: minority class has {minority_count} rows, needs at least {config.k_neighbors + 1}")

    minority = rows[train.labels == minority_label]
    categorical = train.categorical_mask

    space = _neighbor_space(minority, categorical)
    _, neighbors = cKDTree(space).query(space, k=config.k_neighbors + 1)

    # drop each point itself; duplicates may push it off the first column
    own = neighbors == np.arange(minority_count)[:, None]
    keep = ~own
    keep[own.sum(axis=1) == 0, -1] = False
    neighbors = neighbors[keep].reshape(minority_count, config.k_neighbors)

    rng = np.random.default_rng(config.seed)
    seeds = rng.integers(0, minority_count, size=n_synthetic)
    picks = neighbors[seeds, rng.integers(0, config.k_neighbors, size=n_synthetic)]
    gaps = rng.uniform(0, 1, size=(n_synthetic, 1))

    synthetic = minority[seeds] + gaps * (minority[picks] - minority[seeds])
    synthetic[:, categorical] = minority[seeds][:, categorical]

    logger.info(f"smote: {n_synthetic} synthetic rows for class {minority_label} ({minority_count} -> {wanted})")

    return train.with_rows(
        np.vstack([rows, synthetic]),
        labels=np.concatenate([train.labels, np.full(n_synthetic, minority_label)]),
    )
