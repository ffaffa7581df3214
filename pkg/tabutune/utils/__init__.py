from typing import Generic, TypeVar
from collections.abc import Iterator
import hashlib

from tabutune.utils.cache import recursive_getattr


def derive_seed(master_seed: int, *names: str) -> int:
    """
    Stable per-task seed from a master seed and a name path.
    Python's hash() is salted per process, so a digest is used instead.
    """
    text = "/".join([str(master_seed), *names])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


T = TypeVar("T")

class ZipCmp(Generic[T]):
    def __init__(self, list: list[T]):
        self.list = list

    def __iter__(self) -> Iterator[tuple[T, T]]:
        yield from zip(self.list[:-1], self.list[1:])
