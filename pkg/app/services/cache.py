"""In-process caches for expensive machine invariants.

Transition monoids are memoised by the structure of the automaton they are
computed from, so repeated variety checks on the same machine reuse the closure.
"""
from __future__ import annotations

import logging
from collections.abc import Hashable
from functools import lru_cache
from typing import Any, Optional

from cachetools import LRUCache

from app.config import get_settings
from app.models.automata import Nfa

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def get_monoid_cache() -> LRUCache:
    """Create (or reuse) the transition monoid cache."""
    settings = get_settings()
    logger.debug(f"Monoid cache enabled with {settings.cache_max_size} entries")
    return LRUCache(maxsize=settings.cache_max_size)


def machine_key(automaton: Nfa) -> Hashable:
    """Structural key: equal keys mean equal automata up to names."""
    return (
        automaton.orientation,
        automaton.alphabet,
        automaton.size,
        tuple(sorted(automaton.initials)),
        tuple(sorted(automaton.finals)),
        tuple(automaton.sorted_transitions()),
    )


def cache_get(key: Hashable) -> Optional[Any]:
    return get_monoid_cache().get(key)


def cache_set(key: Hashable, value: Any) -> None:
    get_monoid_cache()[key] = value


def clear_caches() -> None:
    get_monoid_cache().clear()
