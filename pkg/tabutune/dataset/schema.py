from __future__ import annotations

import enum
import logging
from typing import Any

import numpy as np
import pydantic

from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)


class SchemaError(ValueError):
    pass


class FeatureKind(str, enum.Enum):
    numeric = "numeric"
    categorical = "categorical"


class FeatureSchema(BaseModel):
    name: str
    kind: FeatureKind = FeatureKind.numeric
    categories: list[str] | None = None

    @property
    def is_categorical(self) -> bool:
        return self.kind == FeatureKind.categorical

    @pydantic.model_validator(mode="after")
    def _check_categories(self) -> FeatureSchema:
        if self.categories is not None and not self.is_categorical:
            raise ValueError(f"numeric feature {self.name} cannot have categories")
        return self

    def with_categories(self, categories: list[str]) -> FeatureSchema:
        return FeatureSchema(name=self.name, kind=self.kind, categories=list(categories))


class MissingProfile(BaseModel):
    """
    Per-feature missing fraction, features not listed are never missing.
    """
    fractions: dict[str, float] = Field(default_factory=dict)

    @pydantic.field_validator("fractions")
    @classmethod
    def _check_range(cls, fractions: dict[str, float]) -> dict[str, float]:
        for name, value in fractions.items():
            if not 0 <= value <= 1:
                raise ValueError(f"missing fraction for {name} out of [0,1]: {value}")
        return fractions

    def get(self, name: str) -> float:
        return self.fractions.get(name, 0.)

    @classmethod
    def zero(cls) -> MissingProfile:
        return cls()


class Dataset(BaseModel):
    """
    Column-typed table with binary labels (0 = admitted, 1 = discharged).

    `rows` is a float matrix with NaN marking missing cells once categoricals
    are encoded. Freshly loaded data keeps categorical cells as text in an
    object matrix (None = missing) until `encode_categoricals` runs.
    Arrays are made read-only; every operation returns a new Dataset.
    """
    model_config = pydantic.ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    features: list[FeatureSchema]
    rows: np.ndarray
    labels: np.ndarray

    @pydantic.field_validator("rows", mode="before")
    @classmethod
    def _convert_rows(cls, rows: Any) -> np.ndarray:
        if isinstance(rows, np.ndarray) and rows.dtype != object:
            return rows.astype(np.float64)

        rows = np.array(rows, dtype=object)
        if all(value is None or isinstance(value, (int, float, np.number)) for value in rows.flat):
            values = [np.nan if value is None else float(value) for value in rows.flat]
            return np.array(values, dtype=np.float64).reshape(rows.shape)
        return rows

    @pydantic.field_validator("labels", mode="before")
    @classmethod
    def _convert_labels(cls, labels: Any) -> np.ndarray:
        return np.asarray(labels, dtype=np.int64).reshape(-1)

    @pydantic.model_validator(mode="after")
    def _check_shape(self) -> Dataset:
        names = [feature.name for feature in self.features]
        if len(set(names)) != len(names):
            raise SchemaError(f"feature names not unique: {names}")

        if self.rows.ndim != 2:
            if self.rows.size == 0:
                self.rows = self.rows.reshape(0, len(self.features))
            else:
                raise SchemaError(f"rows must be a matrix, got shape {self.rows.shape}")

        if self.rows.shape[1] != len(self.features):
            raise SchemaError(f"row arity {self.rows.shape[1]} does not match schema length {len(self.features)}")
        if len(self.labels) != self.rows.shape[0]:
            raise SchemaError(f"{len(self.labels)} labels for {self.rows.shape[0]} rows")
        if np.any((self.labels != 0) & (self.labels != 1)):
            raise SchemaError("labels must be 0 or 1")

        self.rows.setflags(write=False)
        self.labels.setflags(write=False)

        return self

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Dataset):
            return False
        if self.features != other.features or self.rows.shape != other.rows.shape:
            return False
        if self.is_encoded != other.is_encoded:
            return False
        if self.is_encoded:
            same_rows = bool(np.array_equal(self.rows, other.rows, equal_nan=True))
        else:
            same_rows = self.rows.tolist() == other.rows.tolist()
        return same_rows and bool(np.array_equal(self.labels, other.labels))

    def __hash__(self) -> int:
        return hash((tuple(self.feature_names), self.rows.shape, self.labels.tobytes()))

    def __len__(self) -> int:
        return self.n

    def __json__(self) -> dict[str, Any]:
        return {
            "features": [feature.model_dump(mode="json") for feature in self.features],
            "rows": self.rows.tolist(),
            "labels": self.labels.tolist(),
        }

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def feature_names(self) -> list[str]:
        return [feature.name for feature in self.features]

    @property
    def is_encoded(self) -> bool:
        return self.rows.dtype != object

    @property
    def categorical_mask(self) -> np.ndarray:
        return np.array([feature.is_categorical for feature in self.features], dtype=bool)

    @property
    def missing_mask(self) -> np.ndarray:
        if self.is_encoded:
            return np.isnan(self.rows)

        return np.vectorize(lambda value: value is None or (isinstance(value, float) and np.isnan(value)), otypes=[bool])(self.rows).reshape(self.rows.shape)

    @property
    def has_missing(self) -> bool:
        return bool(self.missing_mask.any())

    @property
    def class_counts(self) -> tuple[int, int]:
        positives = int(self.labels.sum())
        return self.n - positives, positives

    def values(self) -> np.ndarray:
        """
        Float matrix for learners; raises if categoricals are still text.
        """
        if not self.is_encoded:
            raise SchemaError("dataset holds unencoded categorical text, run encode_categoricals first")
        return self.rows

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise SchemaError(f"unknown feature: {name}")

    def take(self, indices: np.ndarray | list[int]) -> Dataset:
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=list(self.features),
            rows=np.array(self.rows[indices]),
            labels=np.array(self.labels[indices]),
        )

    def select_features(self, indices: list[int]) -> Dataset:
        indices = list(indices)
        return Dataset(
            features=[self.features[i] for i in indices],
            rows=np.array(self.rows[:, indices]),
            labels=np.array(self.labels),
        )

    def with_rows(self, rows: np.ndarray, labels: np.ndarray | None=None, features: list[FeatureSchema] | None=None) -> Dataset:
        return Dataset(
            features=features if features is not None else list(self.features),
            rows=rows,
            labels=labels if labels is not None else np.array(self.labels),
        )
