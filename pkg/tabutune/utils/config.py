from __future__ import annotations

import inspect
import json
import logging
import os
from pathlib import Path
from typing import Any, TypeVar
from collections.abc import Iterator, Mapping

from pydantic import ConfigDict

from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)

ConfigT = TypeVar("ConfigT", bound="ConfigNew")

TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off")


def _coerce(key: str, default: Any, text: str) -> Any:
    """
    Parse an environment string into the type of the declared default.
    """
    if isinstance(default, bool):
        if text.lower() in TRUE_VALUES:
            return True
        if text.lower() in FALSE_VALUES:
            return False
        raise ValueError(f"{key}: expected a boolean, got {text!r}")
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, str):
        return text
    raise ValueError(f"{key}: {type(default).__name__} values can not be set from the environment")


class Config:
    """
    Defaults are the class attributes; a dict (or another config) overrides
    them and unknown keys are rejected.
    """
    def __init__(self, dct: Mapping[str, Any] | Config | None=None):
        self.__dict__ = {}

        items = inspect.getmembers(self.__class__, lambda a: not inspect.isroutine(a))
        for key, value in items:
            if not key.startswith('_'):
                self.__dict__[key] = value

        self.update(dct)

    def __repr__(self) -> str:
        repr_str = f"{self.__class__.__name__}\n"
        width = max([len(x) for x in self.__dict__], default=0)
        for key, value in self.__dict__.items():
            repr_str += "    -{0: <{width}} -> {value}\n".format(key, value=value, width=width)

        return repr_str

    def __iter__(self) -> Iterator[tuple[str, Any]]:
        yield from self.__dict__.items()

    def __getitem__(self, item: str) -> Any:
        return self.__getattribute__(item)

    def get(self, key: str, default: Any=None) -> Any:
        return self.__dict__.get(key, default)

    def update(self, dct: Mapping[str, Any] | Config | None) -> None:
        if dct is None:
            return
        if isinstance(dct, Config):
            dct = dict(dct)

        for key in dct:
            if key not in self.__dict__:
                raise ValueError(f"invalid config key: {key}")

        self.__dict__.update(dct)

    def update_from_env(self, prefix: str, environ: Mapping[str, str] | None=None) -> list[str]:
        """
        Override scalar values from `<PREFIX>_<KEY>` variables; returns the
        keys that were set.
        """
        environ = os.environ if environ is None else environ
        changed = []
        for key, default in list(self.__dict__.items()):
            name = f"{prefix}_{key}".upper()
            if name in environ:
                self.__dict__[key] = _coerce(name, default, environ[name])
                changed.append(key)

        if changed:
            logger.debug(f"config from environment: {', '.join(changed)}")
        return changed


class ConfigNew(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    def write(self, filename: str | Path) -> None:
        with open(filename, "w") as jsonfile:
            jsonfile.write(self.model_dump_json(indent=4))

    @classmethod
    def read(cls: type[ConfigT], filename: str | Path) -> ConfigT:
        with open(filename) as jsonfile:
            data = json.load(jsonfile)

        logger.info(f"read {cls.__name__} from {filename}")
        return cls.model_validate(data)
