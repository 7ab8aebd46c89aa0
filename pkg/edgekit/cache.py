"""In-process store of solved reference tables.

Solving Painleve II on the default grid takes a noticeable fraction of a
second and every worker thread of a run asks for the same table, so solved
tables are kept per parameter tuple and evicted least-recently-used.
"""

from __future__ import annotations

import logging
from collections import OrderedDict
from collections.abc import Callable, Hashable
from dataclasses import dataclass, field
from threading import RLock
from typing import Any

logger = logging.getLogger(__name__)

DEFAULT_MAX_TABLES = 8


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    evictions: int = 0


@dataclass
class Cache:
    """Thread-safe LRU map from solver parameters to solved tables.

    ``get_or_compute`` holds the lock while computing, so concurrent
    requests for one key solve it once.
    """

    max_entries: int = DEFAULT_MAX_TABLES
    stats: CacheStats = field(default_factory=CacheStats)
    _store: OrderedDict[Hashable, Any] = field(default_factory=OrderedDict)
    _lock: RLock = field(default_factory=RLock)

    def __post_init__(self) -> None:
        if self.max_entries < 1:
            raise ValueError(f"max_entries must be >= 1, got {self.max_entries}")

    def get(self, key: Hashable) -> Any | None:
        with self._lock:
            if key not in self._store:
                self.stats.misses += 1
                return None
            self._store.move_to_end(key)
            self.stats.hits += 1
            return self._store[key]

    def set(self, key: Hashable, value: Any) -> None:
        with self._lock:
            self._store[key] = value
            self._store.move_to_end(key)
            while len(self._store) > self.max_entries:
                old, _ = self._store.popitem(last=False)
                self.stats.evictions += 1
                logger.debug("evicted table %s", old)

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """Cached value for ``key``, calling ``compute()`` on a miss."""
        with self._lock:
            value = self.get(key)
            if value is None:
                value = compute()
                self.set(key, value)
            return value

    def clear(self) -> None:
        with self._lock:
            self._store.clear()

    def __contains__(self, key: Hashable) -> bool:
        with self._lock:
            return key in self._store

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)


_cache = Cache()


def get_cache() -> Cache:
    """The process-wide table cache."""
    return _cache
