from __future__ import annotations

import abc
import logging
from typing import Any, ClassVar, Generic, TypeVar

import numpy as np

from tabutune.dataset import Dataset, SchemaError
from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)

ParamsT = TypeVar("ParamsT", bound=BaseModel)


class FitError(ValueError):
    pass


class TrainedModel(abc.ABC):
    """
    A fitted learner: scores rows with the probability of class 1.
    """
    kind: ClassVar[str] = "model"

    def __init__(self, n_features: int, feature_names: list[str] | None=None):
        self.n_features = n_features
        self.feature_names = feature_names or [f"f{index}" for index in range(n_features)]

    @abc.abstractmethod
    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        ...

    def split_counts(self) -> np.ndarray:
        """
        Number of splits on every feature; zero for models without trees.
        """
        return np.zeros(self.n_features, dtype=np.int64)

    def _base_json(self) -> dict[str, Any]:
        return {
            "n_features": self.n_features,
            "feature_names": self.feature_names,
        }


def check_binary(train: Dataset, learner: str) -> None:
    negatives, positives = train.class_counts
    if negatives == 0 or positives == 0:
        raise FitError(f"{learner}: training data holds a single class")


def score(model: TrainedModel, rows: np.ndarray | Dataset) -> np.ndarray:
    """
    Probability of class 1 for every row, clipped to [0, 1].
    """
    if isinstance(rows, Dataset):
        rows = rows.values()
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.shape[1] != model.n_features:
        raise SchemaError(f"{model.kind} model expects {model.n_features} features, got {rows.shape[1]}")

    return np.clip(model.predict_proba(rows), 0., 1.)


class Learner(abc.ABC, Generic[ParamsT]):
    name: ClassVar[str]
    params_type: ClassVar[type[BaseModel]]
    needs_normalization: ClassVar[bool] = False

    @abc.abstractmethod
    def fit(self, train: Dataset, params: ParamsT, seed: int=0) -> TrainedModel:
        ...

    def params_from_dict(self, values: dict[str, Any]) -> ParamsT:
        return self.params_type.model_validate(values)  # type: ignore[return-value]

    def __repr__(self) -> str:
        return f"<Learner {self.name}>"
