"""Exist-hit / exist-miss decision by explicit-state search.

The search explores pairs ``(node, cache state)`` breadth first, so the
witness returned for a positive answer is a shortest path in the product
graph.  With a fixed associativity the product is polynomial in the graph
size, which is what makes the brute-force approach usable at all.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Optional, Sequence

from .cfg import Cfg, CfgError, Edge, block_universe, reachable_nodes, validate
from .policies import (CacheConfig, Outcome, Policy, access,
                       contains, empty_state, enumerate_initial_states, split_prr_label,
                       transition_function)


class ProblemKind(str, Enum):
    HIT = "exist-hit"
    MISS = "exist-miss"

    def __str__(self) -> str:
        return self.value


class InitialMode(str, Enum):
    EMPTY = "empty"
    ARBITRARY = "arbitrary"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Problem:
    kind: ProblemKind
    query: str
    initial: InitialMode = InitialMode.EMPTY

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        object.__setattr__(self, "initial", InitialMode(self.initial))


@dataclass
class SearchStats:
    product_states_explored: int = 0
    initial_states_tried: int = 0
    max_frontier: int = 0
    distinct_cache_states: int = 0


@dataclass
class Verdict:
    answer: bool
    witness: Optional[tuple[Edge, ...]] = None
    initial_state: Any = None
    final_state: Any = None
    stats: SearchStats = field(default_factory=SearchStats)


def _membership(config: CacheConfig, query: str) -> Callable[[Any], bool]:
    p = config.policy
    if p in (Policy.LRU, Policy.FIFO):
        return lambda s: query in s
    if p is Policy.PLRU:
        return lambda s: query in s.lines
    if p is Policy.NMRU:
        return lambda s: any(b == query for b, _ in s)
    set_index, block = split_prr_label(query)
    if set_index >= config.sets:
        return lambda s: False
    return lambda s: block in s.sets[set_index]


def decide(cfg: Cfg, config: CacheConfig, problem: Problem,
           initial_states: Optional[Iterable[Any]] = None) -> Verdict:
    """Decide ``problem`` on ``cfg`` under ``config``.

    ``initial_states`` overrides the initial states implied by
    ``problem.initial`` (used by tests that pin a specific starting state).
    """
    problems = validate(cfg)
    if problems:
        raise CfgError("invalid graph: " + "; ".join(problems))
    if initial_states is None:
        if problem.initial is InitialMode.EMPTY:
            initial_states = [empty_state(config)]
        else:
            initial_states = enumerate_initial_states(config, block_universe(cfg), {problem.query})

    step = transition_function(config)
    member = _membership(config, problem.query)
    want = problem.kind is ProblemKind.HIT
    final = cfg.final
    out = cfg.out_edges
    stats = SearchStats()
    memo: dict = {}
    parent: dict = {}

    def finish(key) -> Verdict:
        path = []
        k = key
        while parent[k] is not None:
            k, e = parent[k]
            path.append(e)
        path.reverse()
        stats.product_states_explored = len(parent)
        stats.distinct_cache_states = len({s for _, s in parent})
        return Verdict(True, tuple(path), k[1], key[1], stats)

    for init in initial_states:
        stats.initial_states_tried += 1
        root = (cfg.start, init)
        if root in parent:
            continue
        parent[root] = None
        if cfg.start == final and member(init) == want:
            return finish(root)
        queue = deque([root])
        while queue:
            if len(queue) > stats.max_frontier:
                stats.max_frontier = len(queue)
            key = queue.popleft()
            node, state = key
            for e in out[node]:
                label = e.label
                if label is None:
                    nstate = state
                else:
                    mk = (state, label)
                    nstate = memo.get(mk)
                    if nstate is None:
                        nstate = memo[mk] = step(state, label)
                nkey = (e.dst, nstate)
                if nkey in parent:
                    continue
                parent[nkey] = (key, e)
                if e.dst == final and member(nstate) == want:
                    return finish(nkey)
                queue.append(nkey)

    stats.product_states_explored = len(parent)
    stats.distinct_cache_states = len({s for _, s in parent})
    return Verdict(False, None, None, None, stats)


def replay(cfg: Cfg, config: CacheConfig, initial_state: Any,
           path: Sequence[Edge]) -> tuple[Any, list[Optional[Outcome]]]:
    """Run ``path`` from ``cfg.start``; outcomes are ``None`` for epsilon edges."""
    state, outcomes = initial_state, []
    node = cfg.start
    for i, e in enumerate(path):
        if e.src != node:
            raise ValueError(f"broken path at edge {i}: expected source {node}, got {e.src}")
        if e.label is None:
            outcomes.append(None)
        else:
            state, o = access(config, state, e.label)
            outcomes.append(o)
        node = e.dst
    return state, outcomes


def path_end(cfg: Cfg, path: Sequence[Edge]) -> str:
    return path[-1].dst if path else cfg.start


def satisfies(cfg: Cfg, config: CacheConfig, problem: Problem, initial_state: Any,
              path: Sequence[Edge]) -> bool:
    """True when ``path`` from ``initial_state`` witnesses ``problem``."""
    try:
        state, _ = replay(cfg, config, initial_state, path)
    except ValueError:
        return False
    if path_end(cfg, path) != cfg.final:
        return False
    return contains(state, problem.query) == (problem.kind is ProblemKind.HIT)


# ------------------------------------------------------ LRU witness shrinking

def remove_cycles(path: Sequence[Edge], source: str) -> list[Edge]:
    """Drop every sub-path that starts and ends at the same node."""
    kept: list[Edge] = []
    at = {source: 0}
    for e in path:
        if e.dst in at:
            cut = at[e.dst]
            for dropped in kept[cut:]:
                at.pop(dropped.dst, None)
            del kept[cut:]
            at[e.dst] = cut
        else:
            kept.append(e)
            at[e.dst] = len(kept)
    return kept


def compress_preserving_blocks(path: Sequence[Edge], source: str) -> list[Edge]:
    """Shorten ``path`` without changing its endpoints or its set of labels.

    The path is cut into segments that each begin with the first occurrence
    of a label not seen earlier (epsilon counts as a label here); cycles are
    removed from each segment after its first edge.
    """
    segments: list[list[Edge]] = []
    seen: set = set()
    for e in path:
        if e.label not in seen:
            seen.add(e.label)
            segments.append([e])
        else:
            segments[-1].append(e)
    out: list[Edge] = []
    for seg in segments:
        out.append(seg[0])
        out.extend(remove_cycles(seg[1:], seg[0].dst))
    return out


def _last_access(path: Sequence[Edge], block: str) -> Optional[int]:
    for i in range(len(path) - 1, -1, -1):
        if path[i].label == block:
            return i
    return None


def minimize_hit_witness_lru(cfg: Cfg, ways: int, query: str, path: Sequence[Edge]) -> list[Edge]:
    """Shrink an LRU empty-start exist-hit witness to at most ``2|V|`` edges."""
    config = CacheConfig(Policy.LRU, ways)
    problem = Problem(ProblemKind.HIT, query)
    if not satisfies(cfg, config, problem, (), path):
        raise ValueError("path is not an exist-hit witness")
    i = _last_access(path, query)
    head = remove_cycles(path[:i], cfg.start)
    tail = remove_cycles(path[i + 1:], path[i].dst)
    result = head + [path[i]] + tail
    assert satisfies(cfg, config, problem, (), result)
    return result


def minimize_miss_witness_lru(cfg: Cfg, ways: int, query: str, path: Sequence[Edge]) -> list[Edge]:
    """Shrink an LRU empty-start exist-miss witness, keeping the block set
    accessed before and after the last access to ``query``."""
    config = CacheConfig(Policy.LRU, ways)
    problem = Problem(ProblemKind.MISS, query)
    if not satisfies(cfg, config, problem, (), path):
        raise ValueError("path is not an exist-miss witness")
    i = _last_access(path, query)
    if i is None:
        result = compress_preserving_blocks(path, cfg.start)
    else:
        result = (compress_preserving_blocks(path[:i], cfg.start) + [path[i]]
                  + compress_preserving_blocks(path[i + 1:], path[i].dst))
    assert satisfies(cfg, config, problem, (), result)
    return result


def hit_witness_bound(cfg: Cfg) -> int:
    return 2 * len(cfg.nodes)


def miss_witness_bounds(cfg: Cfg) -> tuple[int, int]:
    """``(2|V||B|, 2|V||E|)``; ``B`` counts epsilon as a label when present."""
    labels = {e.label for e in cfg.edges}
    return 2 * len(cfg.nodes) * len(labels), 2 * len(cfg.nodes) * len(cfg.edges)


# ------------------------------------------------------------ classification

class Classification(str, Enum):
    ALWAYS_HIT = "always-hit"
    ALWAYS_MISS = "always-miss"
    DEFINITELY_UNKNOWN = "definitely-unknown"
    UNREACHABLE = "unreachable"

    def __str__(self) -> str:
        return self.value


def classify_access(cfg: Cfg, config: CacheConfig, edge: Edge,
                    initial: InitialMode = InitialMode.EMPTY) -> Classification:
    """Exact hit/miss classification of the access made by ``edge``."""
    if edge.label is None:
        raise ValueError("epsilon edges make no access")
    if edge.src not in reachable_nodes(cfg):
        return Classification.UNREACHABLE
    at_src = cfg.with_endpoints(final=edge.src)
    can_hit = decide(at_src, config, Problem(ProblemKind.HIT, edge.label, initial)).answer
    can_miss = decide(at_src, config, Problem(ProblemKind.MISS, edge.label, initial)).answer
    if can_hit and can_miss:
        return Classification.DEFINITELY_UNKNOWN
    return Classification.ALWAYS_HIT if can_hit else Classification.ALWAYS_MISS
