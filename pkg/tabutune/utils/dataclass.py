from __future__ import annotations

from typing import Any

import pydantic
from pydantic import ConfigDict, Field  # export Field

from tabutune.utils.cache import hash_list

__all__ = ["BaseModel", "Field"]


class BaseModel(pydantic.BaseModel):
    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        extra="forbid"
        )

    def __eq__(self, other: Any) -> bool:
        return other.__class__ == self.__class__ and self.__dict__ == other.__dict__

    def __json__(self) -> dict[str, Any]:
        return self.model_dump(mode="json")

    @classmethod
    def __from_json__(cls, **kwargs: Any) -> BaseModel:
        return cls.model_validate(kwargs)

    def __hash__(self) -> int:
        return hash_list(*[str(v) for v in self.model_dump().values()])
