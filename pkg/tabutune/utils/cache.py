from __future__ import annotations

import collections
import logging
import threading
import weakref
from typing import Generic, TypeVar, Any
from collections.abc import Callable, Hashable


logger = logging.getLogger(__name__)

Result = TypeVar("Result")

# live caches; an objective cache leaves the registry with its objective
cache_instances: weakref.WeakSet[LruCache[Any]] = weakref.WeakSet()

def clear() -> None:
    for instance in list(cache_instances):
        instance.clear()

def stats() -> list[tuple[str, int, int]]:
    return sorted(
        (instance.name, instance.hits, instance.misses) for instance in list(cache_instances)
    )


class LruCache(Generic[Result]):
    """
    Ordered cache with hit/miss counters. Lookups and inserts are guarded by a
    lock so neighbourhood evaluations may share one instance.
    """
    def __init__(self, maxsize: int=128, name: str="unnamed") -> None:
        self.maxsize = maxsize
        self.name = name
        self.cache: collections.OrderedDict[Hashable, Result] = collections.OrderedDict()
        self._lock = threading.Lock()

        self.hits = 0
        self.misses = 0

        cache_instances.add(self)

    def __len__(self) -> int:
        return len(self.cache)

    def __contains__(self, key: Hashable) -> bool:
        return key in self.cache

    def clear(self) -> None:
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def get(self, key: Hashable) -> Result | None:
        with self._lock:
            try:
                value = self.cache.pop(key)
                self.cache[key] = value
                self.hits += 1
                return value
            except KeyError:
                self.misses += 1
                return None

    def set(self, key: Hashable, value: Result) -> None:
        with self._lock:
            # identical keys carry identical values: last write wins
            self.cache.pop(key, None)

            while len(self.cache) >= self.maxsize:
                self.cache.popitem(last=False)

            self.cache[key] = value


def memoize(cache: LruCache[Result], key_function: Callable[..., Hashable], enabled: Callable[[], bool]) -> Callable[[Callable[..., Result]], Callable[..., Result]]:
    def wrapper(function: Callable[..., Result]) -> Callable[..., Result]:
        def new_function(*args: Any) -> Result:
            if not enabled():
                return function(*args)

            key = key_function(*args)
            value = cache.get(key)
            if value is None:
                value = function(*args)
                cache.set(key, value)

            return value

        new_function.__doc__ = function.__doc__
        new_function.__name__ = function.__name__
        return new_function

    return wrapper


def recursive_getattr(obj: Any, attr: str) -> Any:
    """
    Recursive Attribute-getter
    """
    if attr == "self":
        return obj
    elif '.' not in attr:
        return getattr(obj, attr)
    else:
        l = attr.split('.')
        return recursive_getattr(getattr(obj, l[0]), '.'.join(l[1:]))


def hash_list(*lst: Any) -> int:
    value_lst: list[int] = []
    for el in lst:
        try:
            thahash = hash(el)
        except TypeError:  # Lists p.e.
            try:
                thahash = hash(tuple(el))
            except TypeError:
                thahash = hash(str(el))

        value_lst.append(thahash)

    return hash(tuple(value_lst))
