"""Sequences of fresh accesses that flush every previously cached block.

FIFO needs ``2N-1`` pairwise distinct accesses and tree-PLRU
``(N/2) log2 N + 1``.  Both bounds are certified here by exhaustive search
over initial states rather than taken on trust.  The adversary may start
with blocks of the flushing sequence already cached; those early hits are
what makes the bounds tight.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Optional

from ..policies import (CacheConfig, Policy, PlruState, enumerate_initial_states, plru_access,
                        plru_adjust_away, plru_pointed_line, run_trace)
from .common import fresh_names

FOREIGN = "?"


# ----------------------------------------------------------------- PLRU

def plru_eviction_bound(ways: int) -> int:
    return ways // 2 * int(math.log2(ways)) + 1


# Certified by :func:`plru_certified_flush_length` (see the test suite) for
# up to 8 ways; larger associativities use the known bound.
PLRU_FLUSH_LENGTHS = {1: 1, 2: 2, 4: 5, 8: 13}


def plru_adversary_states(ways: int, with_empty_lines: bool = True):
    """Every line foreign or (optionally) empty, under every tag vector.

    Foreign blocks are never accessed again, so their identities do not
    matter and one marker per line suffices.
    """
    kinds = (FOREIGN, None) if with_empty_lines else (FOREIGN,)
    tags = list(itertools.product((0, 1), repeat=ways - 1))
    for pattern in itertools.product(kinds, repeat=ways):
        lines = tuple(None if k is None else f"{FOREIGN}{n}" for n, k in enumerate(pattern))
        for t in tags:
            yield PlruState(lines, t)


def _flush_time(state: PlruState, ways: int) -> int:
    """Number of fresh misses until no foreign line is left."""
    n = 0
    while any(b is not None and b.startswith(FOREIGN) for b in state.lines):
        n += 1
        state, _ = plru_access(state, ways, f"_{n}")
    return n


@lru_cache(maxsize=None)
def plru_foreign_flush_time(ways: int, with_empty_lines: bool = True) -> int:
    """Worst flush time when the initial lines hold only foreign blocks.

    This is a lower bound only: an initial state may also hold blocks of the
    flushing sequence itself, whose hits leave the tags elsewhere.
    """
    return max(_flush_time(s, ways) for s in plru_adversary_states(ways, with_empty_lines))


def _plru_successors(lines, tags):
    for k, sym in enumerate(lines):
        if sym == "S":
            yield lines[:k] + ("A",) + lines[k + 1:], plru_adjust_away(tags, k)
    k = lines.index(None) if None in lines else plru_pointed_line(tags)
    yield lines[:k] + ("A",) + lines[k + 1:], plru_adjust_away(tags, k)


def plru_eviction_survivor(ways: int, length: int):
    """An initial state (abstract form) that keeps a foreign block through
    ``length`` distinct accesses, or ``None`` if the sequence always flushes.

    Lines are ``F`` (the foreign block we try to keep), ``A`` (a block never
    accessed again: another foreign block, or one already accessed), ``S``
    (a not-yet-accessed block of the sequence) or empty.  Each access hits
    some resident ``S`` or misses; runs ending with an unclaimed ``S`` are
    inconsistent and dropped.  Other foreign lines behave exactly like ``A``,
    so tracking a single ``F`` is enough.
    """
    all_tags = list(itertools.product((0, 1), repeat=ways - 1))
    for f in range(ways):
        frontier = set()
        for rest in itertools.product(("A", "S", None), repeat=ways - 1):
            if rest.count("S") <= length:
                lines = rest[:f] + ("F",) + rest[f:]
                frontier.update((lines, t) for t in all_tags)
        for _ in range(length):
            frontier = {s for lines, tags in frontier for s in _plru_successors(lines, tags)
                        if "F" in s[0]}
        for lines, tags in frontier:
            if "S" not in lines:
                return lines, tags
    return None


@lru_cache(maxsize=None)
def plru_certified_flush_length(ways: int) -> int:
    """Smallest length of a fresh sequence that flushes every initial state."""
    length = plru_foreign_flush_time(ways) if ways > 1 else 1
    while plru_eviction_survivor(ways, length) is not None:
        length += 1
    return length


def plru_evict_all_sequence(ways: int, taken: Iterable[str] = ()) -> list[str]:
    """Distinct fresh blocks that flush any initial PLRU state.

    Distinct fresh sequences are interchangeable up to renaming, so only the
    length needs to be found.
    """
    if ways < 1 or ways & (ways - 1):
        raise ValueError("PLRU ways must be a power of two")
    return fresh_names(PLRU_FLUSH_LENGTHS.get(ways) or plru_eviction_bound(ways), taken)


# ----------------------------------------------------------------- FIFO

def fifo_eviction_survivor(ways: int, length: int) -> Optional[tuple[str, ...]]:
    """Search for an initial FIFO word keeping a foreign block after
    ``length`` distinct accesses; returns it in abstract form or ``None``.

    Initial words may contain foreign blocks (``F``) and blocks of the
    access sequence itself that have not been accessed yet (``S``).  Each
    access either hits one of the resident ``S`` entries, turning it into an
    accessed block ``A``, or misses.  Runs ending with an unclaimed ``S`` are
    inconsistent (every sequence block is accessed) and are dropped.
    """
    for size in range(ways + 1):
        for word in itertools.product("FS", repeat=size):
            if word.count("S") > length or "F" not in word:
                continue
            frontier = {word}
            for _ in range(length):
                nxt = set()
                for w in frontier:
                    for k, sym in enumerate(w):
                        if sym == "S":
                            nxt.add(w[:k] + ("A",) + w[k + 1:])
                    nxt.add((w[1:] if len(w) == ways else w) + ("A",))
                frontier = nxt
            for w in frontier:
                if "F" in w and "S" not in w:
                    return word
    return None


def fifo_concrete_survivor(ways: int, length: int):
    """Concrete counterpart of :func:`fifo_eviction_survivor` by enumeration of
    canonical initial states over the sequence blocks and placeholders."""
    seq = fresh_names(length, ())
    config = CacheConfig(Policy.FIFO, ways)
    for init in enumerate_initial_states(config, seq):
        final, _ = run_trace(config, init, seq)
        if any(b not in seq for b in final):
            return init
    return None


__all__ = ["plru_eviction_bound", "plru_adversary_states", "plru_foreign_flush_time",
           "plru_eviction_survivor", "plru_certified_flush_length", "plru_evict_all_sequence",
           "fifo_eviction_survivor", "fifo_concrete_survivor"]
