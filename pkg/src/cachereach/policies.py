"""Exact single-set cache semantics for LRU, FIFO, PLRU, NMRU and pseudo-RR.

States are plain immutable tuples so they can be hashed directly by the
state-space search:

* LRU / FIFO: ``tuple[str, ...]``, oldest block first.
* PLRU: :class:`PlruState` -- ``lines`` (``None`` = empty) and ``tags``, the
  N-1 tree bits in heap layout (node k has children 2k+1 and 2k+2; bit 0
  points left, 1 points right).
* NMRU: ``tuple[tuple[str, int], ...]`` of (block, MRU-bit) pairs.
* pseudo-RR: :class:`PrrState` -- one slot array per cache set and the
  eviction index shared by all sets.

Every access function is pure: ``(state, ...) -> (new_state, Outcome)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Optional, Sequence


class Policy(str, Enum):
    LRU = "lru"
    FIFO = "fifo"
    PLRU = "plru"
    NMRU = "nmru"
    PRR = "prr"

    def __str__(self) -> str:
        return self.value


class Outcome(str, Enum):
    HIT = "hit"
    MISS = "miss"


HIT, MISS = Outcome.HIT, Outcome.MISS


class PlruState(NamedTuple):
    lines: tuple[Optional[str], ...]
    tags: tuple[int, ...]


class PrrState(NamedTuple):
    sets: tuple[tuple[Optional[str], ...], ...]
    next: int


Word = tuple[str, ...]
NmruState = tuple[tuple[str, int], ...]


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class CacheConfig:
    policy: Policy
    ways: int
    sets: int = 1

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        if not isinstance(self.ways, int) or self.ways < 1:
            raise ValueError(f"ways must be a positive integer, got {self.ways!r}")
        if self.policy is Policy.PLRU and not is_power_of_two(self.ways):
            raise ValueError(f"PLRU ways must be a power of two, got {self.ways}")
        if self.sets < 1:
            raise ValueError("sets must be >= 1")
        if self.sets != 1 and self.policy is not Policy.PRR:
            raise ValueError("only the pseudo-RR policy models several cache sets")


# --------------------------------------------------------------------- LRU

def lru_access(state: Word, ways: int, block: str) -> tuple[Word, Outcome]:
    if block in state:
        i = state.index(block)
        return state[:i] + state[i + 1:] + (block,), HIT
    if len(state) < ways:
        return state + (block,), MISS
    return state[1:] + (block,), MISS


def lru_membership_oracle(trace: Sequence[str], ways: int, block: str) -> bool:
    """Membership after ``trace`` from an empty cache, by counting distinct
    blocks since the last access to ``block`` (no cache simulation)."""
    last = None
    for i, b in enumerate(trace):
        if b == block:
            last = i
    if last is None:
        return False
    return len(set(trace[last + 1:])) <= ways - 1


# -------------------------------------------------------------------- FIFO

def fifo_access(state: Word, ways: int, block: str) -> tuple[Word, Outcome]:
    if block in state:
        return state, HIT
    if len(state) < ways:
        return state + (block,), MISS
    return state[1:] + (block,), MISS


# -------------------------------------------------------------------- PLRU

_PLRU_PATHS: dict[int, list[tuple[tuple[int, int], ...]]] = {}


def _plru_paths(ways: int) -> list[tuple[tuple[int, int], ...]]:
    """For each line, the (tree node, bit pointing away from the line) pairs on
    its root-to-leaf path."""
    paths = _PLRU_PATHS.get(ways)
    if paths is None:
        depth = ways.bit_length() - 1
        paths = []
        for line in range(ways):
            k, steps = 0, []
            for level in range(depth):
                d = (line >> (depth - 1 - level)) & 1
                steps.append((k, 1 - d))
                k = 2 * k + 1 + d
            paths.append(tuple(steps))
        _PLRU_PATHS[ways] = paths
    return paths


def plru_pointed_line(tags: Sequence[int]) -> int:
    ways = len(tags) + 1
    k, line = 0, 0
    while k < ways - 1:
        d = tags[k]
        line = 2 * line + d
        k = 2 * k + 1 + d
    return line


def plru_adjust_away(tags: Sequence[int], line: int) -> tuple[int, ...]:
    new = list(tags)
    for k, away in _plru_paths(len(tags) + 1)[line]:
        new[k] = away
    return tuple(new)


def plru_access(state: PlruState, ways: int, block: str) -> tuple[PlruState, Outcome]:
    lines, tags = state
    try:
        line = lines.index(block)
        return PlruState(lines, plru_adjust_away(tags, line)), HIT
    except ValueError:
        pass
    try:
        line = lines.index(None)
    except ValueError:
        line = plru_pointed_line(tags)
    new_lines = lines[:line] + (block,) + lines[line + 1:]
    return PlruState(new_lines, plru_adjust_away(tags, line)), MISS


# -------------------------------------------------------------------- NMRU

def nmru_access(state: NmruState, ways: int, block: str) -> tuple[NmruState, Outcome]:
    entries = list(state)
    pos = next((i for i, (b, _) in enumerate(entries) if b == block), None)
    if pos is not None:
        entries[pos] = (block, 1)
        outcome = HIT
    else:
        outcome = MISS
        if len(entries) < ways:
            pos = len(entries)
            entries.append((block, 1))
        else:
            # only a one-way cache can lack a zero bit; it then replaces its sole line
            pos = next((i for i, (_, bit) in enumerate(entries) if bit == 0), 0)
            entries[pos] = (block, 1)
    if len(entries) == ways and all(bit for _, bit in entries):
        entries = [(b, 1 if i == pos and ways > 1 else 0) for i, (b, _) in enumerate(entries)]
    return tuple(entries), outcome


# --------------------------------------------------------------- pseudo-RR

def split_prr_label(label: str) -> tuple[int, str]:
    """``"2:a"`` addresses block ``a`` in cache set 2; a bare ``"a"`` is set 0."""
    head, sep, tail = label.partition(":")
    if sep and head.isdigit() and tail:
        return int(head), tail
    return 0, label


def prr_access(state: PrrState, ways: int, set_index: int, block: str) -> tuple[PrrState, Outcome]:
    slots = state.sets[set_index]
    if block in slots:
        return state, HIT
    nxt = state.next
    new_set = slots[:nxt] + (block,) + slots[nxt + 1:]
    sets = state.sets[:set_index] + (new_set,) + state.sets[set_index + 1:]
    return PrrState(sets, (nxt + 1) % ways), MISS


# ---------------------------------------------------------------- dispatch

def empty_state(config: CacheConfig) -> Any:
    n = config.ways
    if config.policy in (Policy.LRU, Policy.FIFO, Policy.NMRU):
        return ()
    if config.policy is Policy.PLRU:
        return PlruState((None,) * n, (0,) * (n - 1))
    return PrrState(((None,) * n,) * config.sets, 0)


def access(config: CacheConfig, state: Any, label: str) -> tuple[Any, Outcome]:
    """Access the block named by an edge label (for pseudo-RR, ``set:block``)."""
    p, n = config.policy, config.ways
    if p is Policy.LRU:
        return lru_access(state, n, label)
    if p is Policy.FIFO:
        return fifo_access(state, n, label)
    if p is Policy.PLRU:
        return plru_access(state, n, label)
    if p is Policy.NMRU:
        return nmru_access(state, n, label)
    s, b = split_prr_label(label)
    if s >= config.sets:
        raise ValueError(f"set index {s} out of range for {config.sets} sets")
    return prr_access(state, n, s, b)


def transition_function(config: CacheConfig) -> Callable[[Any, str], Any]:
    """A fast ``(state, label) -> state`` closure for the search."""
    p, n = config.policy, config.ways
    fn = {Policy.LRU: lru_access, Policy.FIFO: fifo_access,
          Policy.PLRU: plru_access, Policy.NMRU: nmru_access}.get(p)
    if fn is not None:
        return lambda state, label: fn(state, n, label)[0]
    sets = config.sets

    def prr(state, label):
        s, b = split_prr_label(label)
        if s >= sets:
            raise ValueError(f"set index {s} out of range for {sets} sets")
        return prr_access(state, n, s, b)[0]
    return prr


def run_trace(config: CacheConfig, state: Any, accesses: Iterable) -> tuple[Any, list[Outcome]]:
    """Fold accesses over ``state``.  Items are ``(set_index, block)`` pairs or
    bare block names; the set index only matters for pseudo-RR."""
    outcomes = []
    for item in accesses:
        if isinstance(item, tuple):
            set_index, block = item
        else:
            set_index, block = split_prr_label(item) if config.policy is Policy.PRR else (0, item)
        if config.policy is Policy.PRR:
            state, out = prr_access(state, config.ways, set_index, block)
        else:
            state, out = access(config, state, block)
        outcomes.append(out)
    return state, outcomes


def resident_blocks(state: Any) -> list[str]:
    """Occupied blocks, in line order (pseudo-RR: ``set:block`` for every set)."""
    if isinstance(state, PlruState):
        return [b for b in state.lines if b is not None]
    if isinstance(state, PrrState):
        return [f"{s}:{b}" for s, slots in enumerate(state.sets) for b in slots if b is not None]
    if state and isinstance(state[0], tuple):
        return [b for b, _ in state]
    return list(state)


def contains(state: Any, block: str) -> bool:
    if isinstance(state, PlruState):
        return block in state.lines
    if isinstance(state, PrrState):
        s, b = split_prr_label(block)
        return s < len(state.sets) and b in state.sets[s]
    if state and isinstance(state[0], tuple):
        return any(b == block for b, _ in state)
    return block in state


def canonical_key(state: Any) -> bytes:
    """Injective byte encoding of a state (for a fixed configuration)."""
    return repr(tuple(state)).encode("utf-8")


def render(state: Any) -> str:
    if isinstance(state, PlruState):
        lines = " ".join("-" if b is None else b for b in state.lines)
        return f"[{lines}] tags={''.join(map(str, state.tags))} -> line {plru_pointed_line(state.tags)}" \
            if state.tags else f"[{lines}]"
    if isinstance(state, PrrState):
        sets = " ".join(f"{s}[{' '.join('-' if b is None else b for b in slots)}]"
                        for s, slots in enumerate(state.sets))
        return f"{sets} next={state.next}"
    if state and isinstance(state[0], tuple):
        return " ".join(f"{b}^{bit}" for b, bit in state)
    return "[" + " ".join(state) + "]"


def check_state(config: CacheConfig, state: Any) -> list[str]:
    """Type-invariant violations of ``state`` under ``config`` (empty when legal)."""
    n, p = config.ways, config.policy
    bad = []
    if p in (Policy.LRU, Policy.FIFO):
        if len(state) > n:
            bad.append("word longer than ways")
        if len(set(state)) != len(state):
            bad.append("repeated block")
    elif p is Policy.PLRU:
        if len(state.lines) != n or len(state.tags) != n - 1:
            bad.append("wrong shape")
        blocks = [b for b in state.lines if b is not None]
        if len(set(blocks)) != len(blocks):
            bad.append("repeated block")
        if any(t not in (0, 1) for t in state.tags):
            bad.append("tag not a bit")
    elif p is Policy.NMRU:
        blocks = [b for b, _ in state]
        if len(state) > n:
            bad.append("too many entries")
        if len(set(blocks)) != len(blocks):
            bad.append("repeated block")
        if len(state) == n and all(bit for _, bit in state):
            bad.append("full cache with every MRU-bit set")
    else:
        if len(state.sets) != config.sets or any(len(s) != n for s in state.sets):
            bad.append("wrong shape")
        for slots in state.sets:
            blocks = [b for b in slots if b is not None]
            if len(set(blocks)) != len(blocks):
                bad.append("repeated block within a set")
        if not 0 <= state.next < n:
            bad.append("eviction index out of range")
    return bad


# ------------------------------------------------- arbitrary initial states

def placeholder_names(ways: int, taken: Iterable[str]) -> list[str]:
    taken = set(taken)
    prefix = "_bot_"
    while any(t.startswith(prefix) for t in taken):
        prefix = "_" + prefix
    return [f"{prefix}{k}" for k in range(1, ways + 1)]


def _slot_fillings(real: Sequence[str], holders: Sequence[str], length: int,
                   allow_empty: bool) -> Iterator[tuple[Optional[str], ...]]:
    """All fillings of ``length`` slots with distinct real blocks, placeholders
    (used in index order, left to right) and, optionally, empty slots."""
    def rec(pos, used, next_holder, acc):
        if pos == length:
            yield tuple(acc)
            return
        if allow_empty:
            acc.append(None)
            yield from rec(pos + 1, used, next_holder, acc)
            acc.pop()
        for b in real:
            if b not in used:
                used.add(b)
                acc.append(b)
                yield from rec(pos + 1, used, next_holder, acc)
                acc.pop()
                used.discard(b)
        if next_holder < len(holders):
            acc.append(holders[next_holder])
            yield from rec(pos + 1, used, next_holder + 1, acc)
            acc.pop()
    yield from rec(0, set(), 0, [])


def enumerate_initial_states(config: CacheConfig, universe: Iterable[str],
                             extra: Iterable[str] = ()) -> Iterator[Any]:
    """Every legal state over ``universe | extra`` plus interchangeable
    placeholder blocks, one representative per placeholder renaming."""
    n, p = config.ways, config.policy
    labels = sorted(set(universe) | set(extra))
    if p is Policy.PRR:
        per_set: dict[int, list[str]] = {s: [] for s in range(config.sets)}
        for lab in labels:
            s, b = split_prr_label(lab)
            if s < config.sets and b not in per_set[s]:
                per_set[s].append(b)
        options = []
        for s in range(config.sets):
            holders = placeholder_names(n, per_set[s])
            options.append(list(_slot_fillings(sorted(per_set[s]), holders, n, True)))
        for combo in itertools.product(*options):
            for nxt in range(n):
                yield PrrState(tuple(combo), nxt)
        return
    holders = placeholder_names(n, labels)
    if p is Policy.PLRU:
        tag_vectors = list(itertools.product((0, 1), repeat=n - 1))
        for lines in _slot_fillings(labels, holders, n, True):
            for tags in tag_vectors:
                yield PlruState(lines, tags)
        return
    for length in range(n + 1):
        for word in _slot_fillings(labels, holders, length, False):
            if p is Policy.NMRU:
                for bits in itertools.product((0, 1), repeat=length):
                    if length == n and all(bits):
                        continue
                    yield tuple(zip(word, bits))
            else:
                yield word
