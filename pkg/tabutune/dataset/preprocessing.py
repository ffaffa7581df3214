from __future__ import annotations

import logging

import numpy as np
import pydantic

from tabutune.dataset.schema import Dataset, FeatureSchema, SchemaError
from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)


class ImputeError(ValueError):
    pass


class SizeError(ValueError):
    pass


class StratificationError(ValueError):
    pass


def encode_categoricals(dataset: Dataset) -> Dataset:
    """
    Replace categorical text by its index in the feature's category list.
    Already encoded datasets are returned unchanged.
    """
    if dataset.is_encoded:
        return dataset

    rows = np.full(dataset.rows.shape, np.nan, dtype=np.float64)
    features: list[FeatureSchema] = []

    for column_no, feature in enumerate(dataset.features):
        column = dataset.rows[:, column_no]

        if not feature.is_categorical:
            rows[:, column_no] = [np.nan if value is None else float(value) for value in column]
            features.append(feature)
            continue

        categories = list(feature.categories or [])
        lookup = {category: index for index, category in enumerate(categories)}
        for row_no, value in enumerate(column):
            if value is None or (isinstance(value, float) and np.isnan(value)):
                continue
            text = str(value)
            if text not in lookup:
                lookup[text] = len(categories)
                categories.append(text)
            rows[row_no, column_no] = lookup[text]

        if not categories:
            raise SchemaError(f"categorical feature {feature.name} has no categories")

        features.append(feature.with_categories(categories))

    return Dataset(features=features, rows=rows, labels=np.array(dataset.labels))


class Scaling(BaseModel):
    """
    Min-max statistics per column. Columns not scaled carry None.
    """
    ranges: list[tuple[float, float] | None]

    @pydantic.field_validator("ranges")
    @classmethod
    def _check_ranges(cls, ranges: list[tuple[float, float] | None]) -> list[tuple[float, float] | None]:
        for value in ranges:
            if value is not None and value[0] > value[1]:
                raise ValueError(f"invalid range: {value}")
        return ranges

    def apply(self, dataset: Dataset) -> Dataset:
        values = dataset.values()
        if values.shape[1] != len(self.ranges):
            raise SchemaError(f"scaling for {len(self.ranges)} columns applied to {values.shape[1]}")

        rows = np.array(values, dtype=np.float64)
        for column_no, value_range in enumerate(self.ranges):
            if value_range is None:
                continue
            low, high = value_range
            if high == low:
                rows[:, column_no] = np.where(np.isnan(rows[:, column_no]), np.nan, 0.)
            else:
                rows[:, column_no] = (rows[:, column_no] - low) / (high - low)

        return dataset.with_rows(rows)


def normalize_minmax(dataset: Dataset, fit_rows: np.ndarray | list[int] | None=None, include_categorical: bool=False) -> tuple[Dataset, Scaling]:
    """
    Map columns to (x - min) / (max - min) with statistics from `fit_rows`
    only. Rows outside fit_rows are not clamped. Constant columns map to 0.
    Integer-coded categoricals are scaled only with include_categorical, the
    route used for the MLP and Lasso paths.
    """
    values = dataset.values()
    if fit_rows is None:
        fit_rows = np.arange(dataset.n)
    fit_rows = np.asarray(fit_rows, dtype=np.int64)
    if len(fit_rows) == 0:
        raise SizeError("normalize_minmax needs at least one fit row")

    fit_values = values[fit_rows]
    ranges: list[tuple[float, float] | None] = []
    for column_no, feature in enumerate(dataset.features):
        if feature.is_categorical and not include_categorical:
            ranges.append(None)
            continue

        column = fit_values[:, column_no]
        column = column[~np.isnan(column)]
        if len(column) == 0:
            ranges.append((0., 0.))
        else:
            ranges.append((float(column.min()), float(column.max())))

    scaling = Scaling(ranges=ranges)
    return scaling.apply(dataset), scaling


def _nan_euclidean(block: np.ndarray, block_present: np.ndarray, donors: np.ndarray, donors_present: np.ndarray) -> np.ndarray:
    """
    Euclidean distance over mutually present coordinates, rescaled by
    total / usable coordinates. Pairs without a shared coordinate get inf.
    """
    n_features = block.shape[1]
    a = np.where(block_present, block, 0.)
    b = np.where(donors_present, donors, 0.)
    pa = block_present.astype(np.float64)
    pb = donors_present.astype(np.float64)

    squared = (a ** 2) @ pb.T + pa @ (b ** 2).T - 2 * a @ b.T
    np.maximum(squared, 0., out=squared)
    usable = pa @ pb.T

    with np.errstate(divide="ignore", invalid="ignore"):
        distances = np.sqrt(squared * n_features / usable)
    distances[usable == 0] = np.inf

    return distances


def _fill_value(feature: FeatureSchema, donors: np.ndarray) -> float:
    mean = float(donors.mean())
    if not feature.is_categorical:
        return mean

    top = len(feature.categories) - 1 if feature.categories else np.inf
    return float(np.clip(np.rint(mean), 0, top))


def knn_impute(dataset: Dataset, k: int=4, block_size: int=512) -> Dataset:
    """
    Fill each missing cell with the mean of that column over the k nearest
    rows having the column present. Present cells are never altered.

    Distances use the numeric columns only. Categorical cells get the
    rounded neighbour mean, clamped to a valid code.
    """
    if k < 1:
        raise ValueError(f"k must be positive: {k}")

    values = dataset.values()
    present = ~np.isnan(values)

    if present.all():
        return dataset

    for column_no, feature in enumerate(dataset.features):
        if not present[:, column_no].any():
            raise ImputeError(f"column '{feature.name}' is entirely missing")

    numeric = ~dataset.categorical_mask
    numeric_values = values[:, numeric]
    numeric_present = present[:, numeric]

    result = np.array(values, dtype=np.float64)
    incomplete = np.flatnonzero(~present.all(axis=1))
    short_of_donors = 0

    for start in range(0, len(incomplete), block_size):
        block_rows = incomplete[start:start+block_size]
        distances = _nan_euclidean(
            numeric_values[block_rows], numeric_present[block_rows], numeric_values, numeric_present)
        # a row is never its own donor
        distances[np.arange(len(block_rows)), block_rows] = np.inf

        for block_no, row_no in enumerate(block_rows):
            for column_no in np.flatnonzero(~present[row_no]):
                candidates = np.flatnonzero(present[:, column_no] & np.isfinite(distances[block_no]))
                if len(candidates) == 0:
                    # no shared coordinate with any donor: fall back on every donor of the column
                    candidates = np.flatnonzero(present[:, column_no])
                    candidates = candidates[candidates != row_no]
                    order = candidates
                else:
                    order = candidates[np.argsort(distances[block_no, candidates], kind="stable")]

                if len(order) < k:
                    short_of_donors += 1
                neighbours = order[:k]
                result[row_no, column_no] = _fill_value(dataset.features[column_no], values[neighbours, column_no])

    if short_of_donors:
        logger.warning(f"{short_of_donors} cells imputed from fewer than {k} donors")

    logger.info(f"imputed {int((~present).sum())} cells in {len(incomplete)} rows (k={k})")

    return dataset.with_rows(result)


def random_sample(dataset: Dataset, m: int, seed: int) -> Dataset:
    """
    Uniform sample without replacement; rows keep their original order.
    """
    if m < 1:
        raise SizeError(f"sample size must be positive: {m}")
    if m > dataset.n:
        raise SizeError(f"sample size {m} exceeds dataset size {dataset.n}")

    rng = np.random.default_rng(seed)
    indices = np.sort(rng.choice(dataset.n, size=m, replace=False))

    return dataset.take(indices)


def stratified_split_indices(labels: np.ndarray, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1): {test_fraction}")

    rng = np.random.default_rng(seed)
    train: list[np.ndarray] = []
    test: list[np.ndarray] = []

    for label in (0, 1):
        members = np.flatnonzero(labels == label)
        if len(members) < 2:
            raise StratificationError(f"class {label} has {len(members)} rows, at least 2 needed")

        members = rng.permutation(members)
        n_test = int(round(test_fraction * len(members)))
        n_test = min(max(n_test, 1), len(members) - 1)

        test.append(members[:n_test])
        train.append(members[n_test:])

    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(dataset: Dataset, test_fraction: float=0.3, seed: int=0) -> tuple[Dataset, Dataset]:
    train_indices, test_indices = stratified_split_indices(dataset.labels, test_fraction, seed)
    return dataset.take(train_indices), dataset.take(test_indices)
