"""
Thread-safe memo tables for lazily computed distances.
"""

import threading
from dataclasses import dataclass
from typing import Callable, Dict, Generic, Hashable, Optional, TypeVar

V = TypeVar("V")


@dataclass
class MemoConfig:
    """Configuration for a memo table."""
    max_entries: Optional[int] = None  # None means unbounded
    enabled: bool = True


class Memo(Generic[V]):
    """
    A lock-protected key/value cache.

    Values must be pure functions of their keys, so concurrent callers may race to compute
    a missing entry but always store the same result.
    """

    def __init__(self, config: Optional[MemoConfig] = None):
        """
        Initialize the memo table.

        Args:
            config: Memo configuration; defaults to an unbounded, enabled table
        """
        self.config = config or MemoConfig()
        self._lock = threading.Lock()
        self._table: Dict[Hashable, V] = {}
        self._hits = 0
        self._misses = 0

    def get_or_compute(self, key: Hashable, compute: Callable[[], V]) -> V:
        """
        Return the cached value for key, computing and storing it if missing.

        The computation runs outside the lock so recursive lookups do not deadlock.
        """
        if not self.config.enabled:
            return compute()
        with self._lock:
            if key in self._table:
                self._hits += 1
                return self._table[key]
            self._misses += 1
        value = compute()
        with self._lock:
            limit = self.config.max_entries
            if limit is None or len(self._table) < limit:
                self._table.setdefault(key, value)
        return value

    def clear(self) -> None:
        with self._lock:
            self._table.clear()
            self._hits = 0
            self._misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._table)

    def get_stats(self) -> Dict[str, int]:
        """
        Get current memo statistics.

        Returns:
            Dictionary with hit, miss and size counts
        """
        with self._lock:
            return {
                "hits": self._hits,
                "misses": self._misses,
                "entries": len(self._table),
                "max_entries": self.config.max_entries or 0,
            }
