import logging
from pathlib import Path
from typing import Any

from tabutune.version import __version__
from tabutune.config import config
import tabutune.jsonify

logger = logging.getLogger(__name__)


def load(filename: str | Path) -> Any:
    """
    Read a jsonify document; the metadata envelope is logged and stripped.
    """
    with open(filename) as infile:
        res = tabutune.jsonify.load(infile)
    if isinstance(res, dict) and "data" in res:
        logger.info(f"loading file: {filename}")
        logger.info(res["MetaData"])

        return res["data"]

    return res


def save(data: Any, filename: str | Path, add_meta: bool=True) -> None:
    with open(filename, "w") as outfile:
        tabutune.jsonify.dump(data, outfile, add_meta=add_meta)
