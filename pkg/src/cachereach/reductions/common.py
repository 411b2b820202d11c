"""Shared plumbing for the reduction constructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Sequence

from ..brm import BrmInstr, BrmMachine
from ..cfg import Cfg, CfgBuilder, parse_cfg, serialize_cfg
from ..policies import CacheConfig, Policy
from ..reach import InitialMode, Problem, ProblemKind, Verdict, decide

Alternative = tuple[str, ...]
Stage = list[Alternative]


@dataclass(frozen=True)
class ReductionOutput:
    """A generated cache-analysis instance.

    ``notes`` records construction parameters (register padding, naming
    scheme, ...) and is echoed as comments when the instance is written out.
    """
    cfg: Cfg
    ways: int
    policy: Policy
    problem: ProblemKind
    query: str
    initial: InitialMode = InitialMode.EMPTY
    sets: int = 1
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        object.__setattr__(self, "problem", ProblemKind(self.problem))
        object.__setattr__(self, "initial", InitialMode(self.initial))

    @property
    def config(self) -> CacheConfig:
        return CacheConfig(self.policy, self.ways, self.sets)

    def as_problem(self) -> Problem:
        return Problem(self.problem, self.query, self.initial)

    def decide(self, **kwargs) -> Verdict:
        return decide(self.cfg, self.config, self.as_problem(), **kwargs)

    def with_(self, **changes) -> "ReductionOutput":
        return replace(self, **changes)


# ------------------------------------------------------------------ naming

def bit(b: bool) -> str:
    return "t" if b else "f"


def a_block(i: int, b: bool) -> str:
    return f"a_{i}_{bit(b)}"


def e_block(i: int) -> str:
    return f"e_{i}"


def indexed(name: str, i: int) -> str:
    return f"{name}_{i}"


NAMING_NOTE = "a_<i>_<t|f>, e_<i>, f_<i>, g_<i>, c_<i>, c, d, f, x, p, pp, _fresh_<k>"


def fresh_names(count: int, taken: Iterable[str], stem: str = "_fresh_") -> list[str]:
    """``count`` block names of the form ``<stem><k>`` that avoid ``taken``."""
    taken = set(taken)
    while any(t.startswith(stem) for t in taken):
        stem = "_" + stem
    return [f"{stem}{k}" for k in range(1, count + 1)]


# -------------------------------------------------------------- building

def build_stages(b: CfgBuilder, src: str, dst: str, stages: Sequence[Stage], prefix: str) -> None:
    """Chain switch stages from ``src`` to ``dst``.

    Each stage offers alternative access sequences between two consecutive
    junction nodes ``<prefix>/<j>``.  Single-access alternatives become
    parallel edges; longer ones get private intermediate nodes.
    """
    cur = src
    for j, stage in enumerate(stages, 1):
        nxt = dst if j == len(stages) else b.node(f"{prefix}/{j}")
        for k, alt in enumerate(stage):
            if not alt:
                b.edge(cur, nxt)
                continue
            b.chain(cur, alt, nxt, prefix=f"{prefix}/{j}.{k}.")
        cur = nxt
    if not stages:
        b.edge(src, dst)


def stage_paths(stages: Sequence[Stage]) -> Iterator[tuple[str, ...]]:
    """Every access sequence along a path through ``stages``."""
    for choice in itertools.product(*stages):
        yield tuple(itertools.chain.from_iterable(choice))


def straight(seq: Iterable[str]) -> list[Stage]:
    return [[(lab,)] for lab in seq]


def machine_node(name: str) -> str:
    return f"m.{name}"


GadgetFn = Callable[[BrmInstr], tuple[str, list[Stage]]]


def embed_machine(b: CfgBuilder, machine: BrmMachine, gadget: GadgetFn) -> None:
    """Copy the machine's nodes and replace edge ``k`` by its gadget, whose
    inner nodes are named ``e<k>/<gadget>/<position>``."""
    for n in machine.nodes:
        b.node(machine_node(n))
    for k, e in enumerate(machine.edges):
        name, stages = gadget(e.instr)
        build_stages(b, machine_node(e.src), machine_node(e.dst), stages, f"e{k}/{name}")


def seq_chain(b: CfgBuilder, src: str, dst: str, seq: Sequence[str], prefix: str) -> None:
    build_stages(b, src, dst, straight(seq), prefix)


# ------------------------------------------------------------ text format

def format_reduction(red: ReductionOutput) -> str:
    head = (f"# policy={red.policy.value} ways={red.ways} problem={red.problem.value} "
            f"query={red.query}")
    if red.policy is Policy.PRR:
        head += f" sets={red.sets}"
    if red.initial is not InitialMode.EMPTY:
        head += f" initial={red.initial.value}"
    notes = [f"# {k}: {v}" for k, v in red.notes.items()]
    return "\n".join([head] + notes) + "\n" + serialize_cfg(red.cfg)


def parse_header(text: str) -> dict[str, str]:
    """``key=value`` pairs from the first ``# policy=...`` comment line."""
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#") and "policy=" in s:
            return dict(tok.split("=", 1) for tok in s.lstrip("#").split() if "=" in tok)
    return {}


def parse_reduction(text: str) -> ReductionOutput:
    h = parse_header(text)
    missing = [k for k in ("policy", "ways", "problem", "query") if k not in h]
    if missing:
        raise ValueError(f"reduction header lacks {', '.join(missing)}")
    return ReductionOutput(parse_cfg(text), int(h["ways"]), Policy(h["policy"]),
                           ProblemKind(h["problem"]), h["query"],
                           InitialMode(h.get("initial", "empty")), int(h.get("sets", 1)))


def prepend(red: ReductionOutput, seq: Sequence[str], prefix: str, **changes) -> ReductionOutput:
    """New instance whose start runs ``seq`` before the original start."""
    b = CfgBuilder()
    while any(n.startswith(prefix) for n in red.cfg.nodes):
        prefix = "_" + prefix
    start = b.node(prefix + "start")
    b.copy_graph(red.cfg)
    b.chain(start, seq, red.cfg.start, prefix=prefix)
    b.start, b.final = start, red.cfg.final
    return red.with_(cfg=b.build(), **changes)


def with_final(b: CfgBuilder, start: str, final: str) -> Cfg:
    b.start, b.final = start, final
    return b.build()
