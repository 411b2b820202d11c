"""Boolean register machines: registers, guard/assign edges, reachability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .cnf import CnfFormula


class BrmError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InstrKind(str, Enum):
    GUARD = "guard"
    ASSIGN = "assign"


@dataclass(frozen=True)
class BrmInstr:
    kind: InstrKind
    register: int  # 1-based
    value: bool

    def __post_init__(self):
        object.__setattr__(self, "kind", InstrKind(self.kind))

    def __str__(self) -> str:
        return f"{self.kind.value} {self.register} {'t' if self.value else 'f'}"


@dataclass(frozen=True)
class BrmEdge:
    src: str
    dst: str
    instr: BrmInstr


@dataclass(frozen=True)
class BrmMachine:
    registers: int
    nodes: tuple[str, ...]
    edges: tuple[BrmEdge, ...]
    initial: str
    final: str

    def __post_init__(self):
        if self.registers < 1:
            raise BrmError("a machine needs at least one register")
        names = set(self.nodes)
        if len(names) != len(self.nodes):
            raise BrmError("duplicate node")
        for n in (self.initial, self.final):
            if n not in names:
                raise BrmError(f"undeclared node {n!r}")
        for e in self.edges:
            if e.src not in names or e.dst not in names:
                raise BrmError(f"edge {e.src}->{e.dst} references an undeclared node")
            if not 1 <= e.instr.register <= self.registers:
                raise BrmError(f"register {e.instr.register} out of range 1..{self.registers}")

    def out_edges(self, node: str) -> list[BrmEdge]:
        return [e for e in self.edges if e.src == node]


RegState = tuple[bool, ...]


def brm_step(state: RegState, instr: BrmInstr) -> Optional[RegState]:
    """Execute one instruction; ``None`` when a guard blocks."""
    i = instr.register - 1
    if instr.kind is InstrKind.GUARD:
        return state if state[i] == instr.value else None
    return state[:i] + (instr.value,) + state[i + 1:]


def brm_reachable(machine: BrmMachine) -> tuple[bool, Optional[list[tuple[BrmEdge, RegState]]]]:
    """Breadth-first search over ``(node, registers)`` from the all-false state.

    The witness pairs each edge with the register state after taking it.
    """
    start = (machine.initial, (False,) * machine.registers)
    out: dict[str, list[BrmEdge]] = {n: [] for n in machine.nodes}
    for e in machine.edges:
        out[e.src].append(e)
    parent = {start: None}
    queue = deque([start])
    goal = start if machine.initial == machine.final else None
    while queue and goal is None:
        node, regs = key = queue.popleft()
        for e in out[node]:
            nregs = brm_step(regs, e.instr)
            if nregs is None:
                continue
            nkey = (e.dst, nregs)
            if nkey in parent:
                continue
            parent[nkey] = (key, e)
            if e.dst == machine.final:
                goal = nkey
                break
            queue.append(nkey)
    if goal is None:
        return False, None
    path = []
    k = goal
    while parent[k] is not None:
        prev, e = parent[k]
        path.append((e, k[1]))
        k = prev
    path.reverse()
    return True, path


def count_product_states(machine: BrmMachine) -> int:
    """Number of reachable ``(node, registers)`` pairs."""
    start = (machine.initial, (False,) * machine.registers)
    seen = {start}
    queue = deque([start])
    while queue:
        node, regs = queue.popleft()
        for e in machine.out_edges(node):
            nregs = brm_step(regs, e.instr)
            if nregs is not None and (e.dst, nregs) not in seen:
                seen.add((e.dst, nregs))
                queue.append((e.dst, nregs))
    return len(seen)


def is_acyclic(machine: BrmMachine) -> bool:
    indeg = {n: 0 for n in machine.nodes}
    for e in machine.edges:
        indeg[e.dst] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        n = ready.pop()
        seen += 1
        for e in machine.out_edges(n):
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                ready.append(e.dst)
    return seen == len(machine.nodes)


# ----------------------------------------------------------------- text I/O

def _bit(tok: str, lineno: int) -> bool:
    if tok not in ("t", "f"):
        raise BrmError(f"expected t or f, got {tok!r}", lineno)
    return tok == "t"


def parse_brm(text: str) -> BrmMachine:
    registers = initial = final = None
    nodes: dict[str, None] = {}
    raw_edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "registers" and len(parts) == 2:
            try:
                registers = int(parts[1])
            except ValueError:
                raise BrmError("register count must be an integer", lineno) from None
        elif head == "node" and len(parts) == 2:
            if parts[1] in nodes:
                raise BrmError(f"duplicate node {parts[1]!r}", lineno)
            nodes[parts[1]] = None
        elif head == "edge" and len(parts) == 6:
            _, src, dst, kind, reg, val = parts
            if kind not in ("guard", "assign"):
                raise BrmError(f"unknown instruction {kind!r}", lineno)
            try:
                reg_i = int(reg)
            except ValueError:
                raise BrmError("register index must be an integer", lineno) from None
            raw_edges.append((lineno, src, dst, BrmInstr(InstrKind(kind), reg_i, _bit(val, lineno))))
        elif head in ("init", "initial") and len(parts) == 2:
            initial = parts[1]
        elif head == "final" and len(parts) == 2:
            final = parts[1]
        else:
            raise BrmError(f"cannot parse {line!r}", lineno)
    if registers is None:
        raise BrmError("missing registers line")
    if initial is None or final is None:
        raise BrmError("missing init or final")
    edges = []
    for lineno, src, dst, instr in raw_edges:
        for n in (src, dst):
            if n not in nodes:
                raise BrmError(f"undeclared node {n!r}", lineno)
        if not 1 <= instr.register <= registers:
            raise BrmError(f"register {instr.register} out of range 1..{registers}", lineno)
        edges.append(BrmEdge(src, dst, instr))
    return BrmMachine(registers, tuple(nodes), tuple(edges), initial, final)


def format_brm(machine: BrmMachine) -> str:
    lines = [f"registers {machine.registers}"]
    lines += [f"node {n}" for n in machine.nodes]
    lines += [f"edge {e.src} {e.dst} {e.instr}" for e in machine.edges]
    lines += [f"init {machine.initial}", f"final {machine.final}"]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- SAT encoding

def sat_to_brm(cnf: CnfFormula) -> BrmMachine:
    """Nondeterministically assign every variable, then pass one guard per clause.

    Nodes are ``q0..q<r>`` after the assignment stages and ``c1..c<m>`` after
    each clause stage; an empty clause leaves its stage without outgoing edges.
    """
    r = max(cnf.num_vars, 1)
    nodes = [f"q{k}" for k in range(r + 1)]
    edges = []
    for v in range(1, r + 1):
        for val in (False, True):
            edges.append(BrmEdge(f"q{v - 1}", f"q{v}", BrmInstr(InstrKind.ASSIGN, v, val)))
    prev = f"q{r}"
    for j, clause in enumerate(cnf.clauses, 1):
        node = f"c{j}"
        nodes.append(node)
        for lit in clause:
            edges.append(BrmEdge(prev, node, BrmInstr(InstrKind.GUARD, abs(lit), lit > 0)))
        prev = node
    return BrmMachine(r, tuple(nodes), tuple(edges), "q0", prev)
