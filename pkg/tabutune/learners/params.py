from __future__ import annotations

from typing import Any

import pydantic

from tabutune.utils.dataclass import BaseModel


class GbtParams(BaseModel):
    n_estimators: int = pydantic.Field(10, ge=1, le=50)
    max_depth: int = pydantic.Field(3, ge=0, le=50)
    learning_rate: float = pydantic.Field(0.3, ge=0, le=1)
    gamma: float = pydantic.Field(0., ge=0, le=50)
    max_delta_step: int = pydantic.Field(0, ge=0, le=50)
    n_parallel_trees: int = pydantic.Field(1, ge=0, le=50)


class AdabParams(BaseModel):
    n_estimators: int = pydantic.Field(10, ge=1, le=50)
    learning_rate: float = pydantic.Field(1., ge=0, le=1)
    base_max_depth: int = pydantic.Field(1, ge=1, le=50)
    base_min_samples_split: int = pydantic.Field(2, ge=1, le=50)
    base_min_samples_leaf: int = pydantic.Field(1, ge=1, le=50)


class MlpParams(BaseModel):
    hidden_sizes: tuple[int, int, int] = (5, 5, 5)
    learning_rate: float = pydantic.Field(0.1, gt=0, le=1)
    momentum: float = pydantic.Field(0.9, ge=0, le=1)
    alpha: float = pydantic.Field(1e-3, gt=0, le=1)
    epochs: int = pydantic.Field(200, ge=1)

    @pydantic.field_validator("hidden_sizes")
    @classmethod
    def _check_hidden(cls, sizes: tuple[int, int, int]) -> tuple[int, int, int]:
        for size in sizes:
            if not 1 <= size <= 30:
                raise ValueError(f"hidden layer size out of [1, 30]: {size}")
        return sizes

    @classmethod
    def from_flat(cls, values: dict[str, Any]) -> MlpParams:
        """
        Build from a flat mapping with hidden_1..hidden_3 entries.
        """
        values = dict(values)
        hidden = tuple(int(values.pop(f"hidden_{layer}")) for layer in (1, 2, 3))
        return cls(hidden_sizes=hidden, **values)  # type: ignore[arg-type]
