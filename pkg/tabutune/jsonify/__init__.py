"""
JSON persistence for models, datasets, configs and run records.

Objects with a `__json__` method are written as
`{"_type": ..., "_module": ..., "data": {...}}` and rebuilt through
`__from_json__` (or the constructor) when loading. Only modules matching
`config.json_allowed_modules` are imported while decoding.
"""
from io import TextIOWrapper
import importlib
import json
import logging
import re
import time
from typing import Any

from tabutune.config import config as global_config
import tabutune.version
from tabutune.jsonify.encoder import Encoder
from tabutune.utils import recursive_getattr

__all__ = ['dumps', 'dump', 'loads', 'load']

logger = logging.getLogger(__name__)

TIME_FORMAT = "%d.%m.%y %H:%M"


def _check_module(module: str, name: str) -> None:
    config = global_config
    for rex in config.json_forbidden_modules:
        if re.match(rex, module) or re.match(rex, name):
            raise ValueError(f"forbidden element type: {module}.{name}")

    if not any(re.match(rex, module) for rex in config.json_allowed_modules):
        raise ValueError(f"could not find element type: {module}.{name}")


def get_element(module: str, name: str) -> type[Any]:
    _check_module(module, name)
    try:
        return recursive_getattr(importlib.import_module(module), name)
    except (ModuleNotFoundError, AttributeError) as e:
        raise TypeError(f"{e} in element: {name} ({module})") from e


def object_hook(dct: dict[str, Any]) -> Any:
    if '_type' not in dct or '_module' not in dct:
        return dct

    obj = get_element(dct["_module"], dct["_type"])

    # a class, not an instance
    if "data" not in dct:
        return obj

    deserializer = getattr(obj, '__from_json__', obj)
    try:
        return deserializer(**dct['data'])
    except TypeError as e:
        raise TypeError(f"error in elem: {obj} {e}") from e


def add_metadata(data: Any) -> dict[str, Any]:
    now = time.strftime(TIME_FORMAT)
    if isinstance(data, dict) and 'MetaData' in data:
        data['MetaData']['date_modified'] = now
        return data

    return {
        'MetaData': {
            'application': 'tabutune',
            'version': tabutune.version.__version__,
            'author': global_config.user,
            'date_created': now,
            'date_modified': now,
        },
        'data': data
    }


def dumps(obj: Any, add_meta: bool=True) -> str:
    if add_meta:
        obj = add_metadata(obj)
    return json.dumps(obj, cls=Encoder)


def dump(obj: Any, fp: TextIOWrapper, add_meta: bool=True, pretty: bool=True) -> None:
    if add_meta:
        obj = add_metadata(obj)
    json.dump(obj, fp, cls=Encoder, indent=4 if pretty else None)


def loads(obj: str) -> Any:
    return json.loads(obj, object_hook=object_hook)


def load(fp: TextIOWrapper) -> Any:
    data = json.load(fp, object_hook=object_hook)
    if isinstance(data, dict) and "MetaData" in data:
        logger.debug(f"loaded {data['MetaData'].get('application')} document, version {data['MetaData'].get('version')}")
    return data
