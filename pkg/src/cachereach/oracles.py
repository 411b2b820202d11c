"""Brute-force deciders, seeded instance generators and the equivalence harness.

Every reduction is checked by generating a small source instance, deciding
it directly with a brute-force oracle, reducing it, deciding the cache
problem, and comparing the two answers.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional

from .brm import BrmEdge, BrmInstr, BrmMachine, InstrKind, brm_reachable
from .cfg import Cfg, CfgBuilder
from .cnf import CnfFormula
from .policies import Policy
from .reach import InitialMode, ProblemKind
from .reductions.common import ReductionOutput
from .reductions.fifo import brm_to_fifo, fifo_arbitrary_prologue, fifo_to_prr
from .reductions.lru import ham_to_lru_miss, lru_fresh_prologue, lru_loader_gadget, sat_to_lru_hit
from .reductions.nmru import brm_to_nmru
from .reductions.plru import brm_to_plru, plru_arbitrary_prologue
from .ugraph import UndirectedGraph

SAT_MAX_VARS = 24
HAM_MAX_VERTICES = 10


class OracleLimitError(ValueError):
    pass


# ------------------------------------------------------------------ oracles

def sat_brute(cnf: CnfFormula) -> bool:
    if cnf.num_vars > SAT_MAX_VARS:
        raise OracleLimitError(f"{cnf.num_vars} variables exceed the limit of {SAT_MAX_VARS}")
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if cnf.evaluate(bits):
            return True
    return False


def ham_brute(g: UndirectedGraph) -> bool:
    """Hamiltonian cycle through all vertices, fixing vertex 0 as the start.

    With two vertices the single edge walked there and back counts.
    """
    if g.n > HAM_MAX_VERTICES:
        raise OracleLimitError(f"{g.n} vertices exceed the limit of {HAM_MAX_VERTICES}")
    if g.n < 2:
        return False
    for perm in itertools.permutations(range(1, g.n)):
        cycle = (0,) + perm + (0,)
        if all(g.adjacent(u, v) for u, v in zip(cycle, cycle[1:])):
            return True
    return False


# --------------------------------------------------------------- generators

def random_cnf(seed: int, max_vars: int = 6, max_clauses: int = 8,
               max_width: int = 3) -> CnfFormula:
    rng = random.Random(seed)
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, min(max_width, n))
        vs = rng.sample(range(1, n + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n, tuple(clauses))


def random_graph(seed: int, max_nodes: int = 7) -> UndirectedGraph:
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    p = rng.uniform(0.3, 0.9)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return UndirectedGraph(n, edges)


random_digraph = random_graph


def random_brm(seed: int, max_regs: int = 3, max_edges: int = 10,
               allow_cycles: bool = True, max_nodes: int = 5) -> BrmMachine:
    """Random machine; without ``allow_cycles`` edges only go forward in
    node order (self-loops included as cycles)."""
    rng = random.Random(seed)
    r = rng.randint(1, max_regs)
    n = rng.randint(2, max_nodes)
    nodes = tuple(f"n{i}" for i in range(n))
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        if allow_cycles:
            u, v = rng.randrange(n), rng.randrange(n)
        else:
            u = rng.randrange(n - 1)
            v = rng.randrange(u + 1, n)
        kind = InstrKind.GUARD if rng.random() < 0.5 else InstrKind.ASSIGN
        instr = BrmInstr(kind, rng.randint(1, r), rng.random() < 0.5)
        edges.append(BrmEdge(nodes[u], nodes[v], instr))
    return BrmMachine(r, nodes, tuple(edges), nodes[0], nodes[-1])


def random_cfg(seed: int, max_nodes: int = 5, blocks: int = 3, max_edges: int = 8,
               allow_cycles: bool = True, epsilon: float = 0.1) -> Cfg:
    """Random labelled graph over blocks ``b0, b1, ...`` with a path from
    start to final guaranteed by a spine of edges."""
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    names = [f"q{i}" for i in range(n)]
    alphabet = [f"b{i}" for i in range(blocks)]

    def label():
        return None if rng.random() < epsilon else rng.choice(alphabet)

    b = CfgBuilder()
    for q in names:
        b.node(q)
    for i in range(n - 1):
        b.edge(names[i], names[i + 1], label())
    for _ in range(rng.randint(0, max_edges)):
        if allow_cycles:
            u, v = rng.randrange(n), rng.randrange(n)
        else:
            u = rng.randrange(n - 1)
            v = rng.randrange(u + 1, n)
        b.edge(names[u], names[v], label())
    b.start, b.final = names[0], names[-1]
    return b.build()


def random_cache_instance(seed: int, policy: Policy, ways_choices: Iterable[int],
                          **cfg_opts) -> ReductionOutput:
    rng = random.Random(seed)
    cfg = random_cfg(rng.randrange(1 << 30), **cfg_opts)
    ways = rng.choice(list(ways_choices))
    kind = rng.choice([ProblemKind.HIT, ProblemKind.MISS])
    query = rng.choice(sorted({e.label for e in cfg.edges if e.label} | {"b0"}))
    return ReductionOutput(cfg, ways, policy, kind, query, notes={"source": "random"})


# ------------------------------------------------------------------ harness

@dataclass
class Disagreement:
    seed: int
    instance: str
    oracle: bool
    checker: bool


@dataclass
class CrossCheckReport:
    kind: str
    instances: int = 0
    agreements: int = 0
    disagreements: list[Disagreement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self) -> dict:
        return {"kind": self.kind, "instances": self.instances, "agreements": self.agreements,
                "disagreements": [asdict(d) for d in self.disagreements]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# A mutation receives the ReductionOutput about to be decided and returns a
# (possibly corrupted) replacement; used to show the harness can fail.
Mutation = Callable[[ReductionOutput], ReductionOutput]


def drop_one_edge(red: ReductionOutput) -> ReductionOutput:
    """Delete the first labelled edge leaving a gadget or the prologue."""
    cfg = red.cfg
    victim = next((e for e in cfg.edges if e.label is not None and "/" in e.src), None)
    if victim is None:
        victim = next((e for e in cfg.edges if e.label is not None), None)
    if victim is None:
        return red
    edges = tuple(e for e in cfg.edges if e is not victim)
    return red.with_(cfg=Cfg(cfg.nodes, edges, cfg.start, cfg.final))


def swap_query(red: ReductionOutput) -> ReductionOutput:
    """Flip the problem kind, which inverts the checker on most instances."""
    flipped = ProblemKind.MISS if red.problem is ProblemKind.HIT else ProblemKind.HIT
    return red.with_(problem=flipped)


MUTATIONS: dict[str, Mutation] = {"drop-edge": drop_one_edge, "flip-problem": swap_query}


def _brm_case(builder, problem, **kw):
    def case(seed: int):
        m = random_brm(seed, **kw)
        return f"brm r={m.registers} edges={len(m.edges)}", brm_reachable(m)[0], \
            builder(m, problem)
    return case


def _sat_lru(seed: int):
    cnf = random_cnf(seed)
    return f"cnf vars={cnf.num_vars} clauses={len(cnf.clauses)}", sat_brute(cnf), \
        sat_to_lru_hit(cnf)


def _ham_lru(seed: int):
    g = random_graph(seed)
    return f"graph n={g.n} edges={len(g.edges)}", ham_brute(g), ham_to_lru_miss(g)


def _fifo_prr(seed: int):
    rng = random.Random(seed)
    m = random_brm(seed, max_regs=2, max_edges=6)
    red = brm_to_fifo(m, rng.choice([ProblemKind.HIT, ProblemKind.MISS]), rng.random() < 0.5)
    sets = rng.randint(1, 4)
    oracle = red.decide().answer
    return f"brm r={m.registers} sets={sets}", oracle, fifo_to_prr(red, sets, rng.randrange(sets))


def _empty_vs_arbitrary(policy: Policy, ways, transform):
    def case(seed: int):
        base = random_cache_instance(seed, policy, ways, max_nodes=4, blocks=5, max_edges=7)
        out = transform(base)
        return f"{policy.value} ways={base.ways} {base.problem.value}", base.decide().answer, out
    return case


def _arbitrary_vs_loader(seed: int):
    base = random_cache_instance(seed, Policy.LRU, (1, 2, 3), max_nodes=4, blocks=4,
                                 max_edges=5)
    base = base.with_(initial=InitialMode.ARBITRARY)
    return f"lru ways={base.ways} {base.problem.value}", base.decide().answer, \
        lru_loader_gadget(base)


CASES: dict[str, Callable[[int], tuple[str, bool, ReductionOutput]]] = {
    "sat-lru": _sat_lru,
    "ham-lru": _ham_lru,
    "brm-fifo-hit": _brm_case(lambda m, p: brm_to_fifo(m, p, False), ProblemKind.HIT),
    "brm-fifo-miss": _brm_case(lambda m, p: brm_to_fifo(m, p, False), ProblemKind.MISS),
    "brm-fifo-even-hit": _brm_case(lambda m, p: brm_to_fifo(m, p, True), ProblemKind.HIT),
    "brm-fifo-even-miss": _brm_case(lambda m, p: brm_to_fifo(m, p, True), ProblemKind.MISS),
    "brm-plru-hit": _brm_case(brm_to_plru, ProblemKind.HIT),
    "brm-plru-miss": _brm_case(brm_to_plru, ProblemKind.MISS),
    "brm-nmru-hit": _brm_case(brm_to_nmru, ProblemKind.HIT, max_regs=2, max_edges=6),
    "brm-nmru-miss": _brm_case(brm_to_nmru, ProblemKind.MISS, max_regs=2, max_edges=6),
    "fifo-prr": _fifo_prr,
    "lru-fresh-prologue": _empty_vs_arbitrary(Policy.LRU, (1, 2, 3), lru_fresh_prologue),
    "lru-loader": _arbitrary_vs_loader,
    "fifo-arbitrary": _empty_vs_arbitrary(Policy.FIFO, (1, 2, 3), fifo_arbitrary_prologue),
    "plru-arbitrary": _empty_vs_arbitrary(Policy.PLRU, (1, 2, 4), plru_arbitrary_prologue),
}

KINDS = tuple(CASES)


def run_case(kind: str, seed: int, mutate: Optional[str] = None):
    """``(summary, oracle answer, checker answer)`` for one seed."""
    summary, oracle, red = CASES[kind](seed)
    if mutate is not None:
        red = MUTATIONS[mutate](red)
    return summary, oracle, red.decide().answer


def _run_case_args(args):
    return run_case(*args)


def worker_count() -> int:
    raw = os.environ.get("CACHEREACH_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def crosscheck(kind: str, seeds: Iterable[int], mutate: Optional[str] = None,
               workers: Optional[int] = None) -> CrossCheckReport:
    """Run ``kind`` on every seed and compare checker with oracle.

    ``workers`` (default: ``CACHEREACH_THREADS``, else 1) fans seeds out to
    processes; the report lists seeds in input order either way.
    """
    if kind not in CASES:
        raise ValueError(f"unknown crosscheck kind {kind!r}; expected one of {', '.join(KINDS)}")
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}")
    seeds = list(seeds)
    workers = worker_count() if workers is None else workers
    jobs = [(kind, s, mutate) for s in seeds]
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case_args, jobs))
    else:
        results = [run_case(*j) for j in jobs]
    report = CrossCheckReport(kind)
    for seed, (summary, oracle, checker) in zip(seeds, results):
        report.instances += 1
        if oracle == checker:
            report.agreements += 1
        else:
            report.disagreements.append(Disagreement(seed, summary, oracle, checker))
    return report


__all__ = ["OracleLimitError", "sat_brute", "ham_brute", "random_cnf", "random_graph",
           "random_digraph", "random_brm", "random_cfg", "random_cache_instance",
           "Disagreement", "CrossCheckReport", "MUTATIONS", "drop_one_edge", "swap_query",
           "KINDS", "run_case", "crosscheck", "worker_count"]
