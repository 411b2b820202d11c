"""LRU constructions: CNF-SAT to exist-hit, Hamiltonian circuit to
exist-miss, and the two transforms between empty and arbitrary starts."""

from __future__ import annotations

from collections import Counter

from ..cfg import CfgBuilder, block_universe
from ..cnf import CnfFormula
from ..policies import Policy
from ..reach import InitialMode, ProblemKind
from ..ugraph import UndirectedGraph
from .common import ReductionOutput, bit, fresh_names, prepend, with_final


def literal_block(lit: int) -> str:
    return f"b_{abs(lit)}_{bit(lit > 0)}"


def sat_to_lru_hit(cnf: CnfFormula) -> ReductionOutput:
    """Load ``x``, pick one block per variable, then one literal block per clause.

    ``x`` survives to ``F`` iff no more than ``num_vars`` distinct blocks
    follow it, i.e. iff the clause choices only reuse the variable choices.
    """
    b = CfgBuilder()
    start, s = b.node("start"), b.node("S")
    b.edge(start, s, "x")
    cur = s
    n, m = cnf.num_vars, len(cnf.clauses)
    for v in range(1, n + 1):
        nxt = b.node("F" if (v == n and m == 0) else f"var{v}")
        b.edge(cur, nxt, literal_block(v))
        b.edge(cur, nxt, literal_block(-v))
        cur = nxt
    for j, clause in enumerate(cnf.clauses, 1):
        nxt = b.node("F" if j == m else f"cl{j}")
        for lit in clause:
            b.edge(cur, nxt, literal_block(lit))
        cur = nxt
    if cur != "F":
        b.node("F")
        b.edge(cur, "F")
    return ReductionOutput(with_final(b, start, "F"), n + 1, Policy.LRU, ProblemKind.HIT, "x",
                           notes={"source": "cnf", "variables": n, "clauses": m,
                                  "blocks": "b_<var>_<t|f>, x"})


def limit_literal_occurrences(cnf: CnfFormula) -> CnfFormula:
    """Equisatisfiable CNF where each literal occurs at most twice.

    Every occurrence of a variable used at least twice gets its own copy;
    a cycle of implications ties the copies together.
    """
    counts = Counter(abs(l) for c in cnf.clauses for l in c)
    next_var = 0
    copies: dict[int, list[int]] = {}
    for v in range(1, cnf.num_vars + 1):
        k = counts.get(v, 0)
        copies[v] = list(range(next_var + 1, next_var + max(k, 1) + 1))
        next_var += max(k, 1)
    used = Counter()
    clauses = []
    for c in cnf.clauses:
        new = []
        for lit in c:
            v = abs(lit)
            copy = copies[v][used[v]] if counts[v] >= 2 else copies[v][0]
            used[v] += 1
            new.append(copy if lit > 0 else -copy)
        clauses.append(tuple(new))
    for v in range(1, cnf.num_vars + 1):
        cs = copies[v]
        if counts.get(v, 0) >= 2:
            for j in range(len(cs)):
                clauses.append((-cs[j], cs[(j + 1) % len(cs)]))
    return CnfFormula(next_var, tuple(clauses))


def occurrence_audit(cnf: CnfFormula) -> dict:
    lits = cnf.literal_counts()
    vars_ = cnf.variable_counts()
    return {"max_literal_occurrences": max(lits.values(), default=0),
            "max_variable_occurrences": max(vars_.values(), default=0)}


def ham_node(i: int, j: int) -> str:
    return f"v_{i}_{j}"


def ham_block(i: int) -> str:
    return f"v{i}"


def ham_to_lru_miss(g: UndirectedGraph) -> ReductionOutput:
    """Layered DAG whose start-to-end paths visit one vertex per layer.

    A path accesses ``n`` distinct blocks (evicting ``x`` from an ``n``-way
    LRU cache) iff it spells a Hamiltonian circuit through vertex 0.
    """
    n = g.n
    if n < 2:
        raise ValueError("need at least two vertices")
    b = CfgBuilder()
    start = b.node("start")
    first, last = b.node(ham_node(0, 0)), ham_node(0, n)
    b.edge(start, first, "x")
    for j in range(1, n):
        for i in range(1, n):
            b.node(ham_node(i, j))
    b.node(last)
    for i in range(1, n):
        if g.adjacent(0, i):
            b.edge(first, ham_node(i, 1), ham_block(i))
    for j in range(1, n - 1):
        for i in range(1, n):
            for k in range(1, n):
                if g.adjacent(i, k):
                    b.edge(ham_node(i, j), ham_node(k, j + 1), ham_block(k))
    for i in range(1, n):
        if g.adjacent(i, 0):
            b.edge(ham_node(i, n - 1), last, ham_block(0))
    return ReductionOutput(with_final(b, start, last), n, Policy.LRU, ProblemKind.MISS, "x",
                           notes={"source": "hamiltonian", "vertices": n,
                                  "blocks": "v<vertex>, x"})


def _alphabet(red: ReductionOutput) -> set[str]:
    return block_universe(red.cfg) | ({red.query} if red.query else set())


def lru_fresh_prologue(red: ReductionOutput) -> ReductionOutput:
    """Empty-start instance -> equivalent arbitrary-start instance.

    ``N`` distinct fresh accesses flush every block of the original instance.
    """
    seq = fresh_names(red.ways, _alphabet(red))
    out = prepend(red, seq, "_pro", initial=InitialMode.ARBITRARY)
    return out.with_(notes={**red.notes, "prologue": " ".join(seq)})


def lru_loader_gadget(red: ReductionOutput) -> ReductionOutput:
    """Arbitrary-start instance -> equivalent empty-start instance.

    ``N`` stages, each offering every block of the alphabet, with an
    epsilon exit to the original start before and after every stage, load
    any sequence of up to ``N`` blocks.
    """
    alphabet = sorted(_alphabet(red))
    prefix = "_load"
    while any(n.startswith(prefix) for n in red.cfg.nodes):
        prefix = "_" + prefix
    b = CfgBuilder()
    stages = [b.node(f"{prefix}{k}") for k in range(red.ways + 1 if alphabet else 1)]
    b.copy_graph(red.cfg)
    for k in range(1, len(stages)):
        for blk in alphabet:
            b.edge(stages[k - 1], stages[k], blk)
    for q in stages:
        b.edge(q, red.cfg.start)
    return red.with_(cfg=with_final(b, stages[0], red.cfg.final), initial=InitialMode.EMPTY,
                     notes={**red.notes, "loader_blocks": len(alphabet)})
