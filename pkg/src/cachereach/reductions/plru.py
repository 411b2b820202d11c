"""Register machine to tree-PLRU exist-hit / exist-miss.

The cache lines hold ``c, e_0, a_1, e_1, ..., a_r, e_r`` and are used as a
random-access memory: the hit-only sequence ``pi_i`` aims the tree tags at
line ``2i`` so that the next miss lands there.  A guard that fails overwrites
``c``, which nothing ever restores.
"""

from __future__ import annotations

from typing import Optional

from ..brm import BrmInstr, BrmMachine, InstrKind, RegState
from ..cfg import CfgBuilder, block_universe
from ..policies import Policy, PlruState
from ..reach import InitialMode, ProblemKind
from .common import (NAMING_NOTE, ReductionOutput, a_block, e_block, embed_machine,
                     machine_node, prepend, seq_chain, straight, with_final)
from .evict import plru_evict_all_sequence

C, D, F = "c", "d", "f"


def plru_registers(r: int) -> int:
    """Smallest ``r' >= r`` with ``2r'+2`` a power of two."""
    ways = 1
    while ways < 2 * r + 2:
        ways *= 2
    return (ways - 2) // 2


def plru_pi_sequence(i: int, r: int) -> list[str]:
    """Hit-only accesses that make the tags point at line ``2i``.

    Climbing from that leaf, each level accesses the lowest-numbered ``e``
    block in the sibling subtree, which turns the tag at that level toward
    the leaf.
    """
    rp = plru_registers(r)
    if not 0 <= i <= rp:
        raise ValueError(f"pi index {i} outside 0..{rp}")
    ways = 2 * rp + 2
    leaf, size, seq = 2 * i, 1, []
    while size < ways:
        sibling = ((leaf // size) * size) ^ size
        first_odd = sibling if sibling % 2 else sibling + 1
        seq.append(e_block(first_odd // 2))
        size *= 2
    return seq


def plru_phi(i: int, b: bool, r: int) -> list[str]:
    return plru_pi_sequence(0, r) + [a_block(i, b)]


def plru_psi(i: int, b: bool, r: int) -> list[str]:
    return plru_pi_sequence(i, r) + [a_block(i, b)]


def plru_prologue(r: int) -> list[str]:
    rp = plru_registers(r)
    seq = [C, e_block(0)]
    for i in range(1, rp + 1):
        seq += [a_block(i, False), e_block(i)]
    return seq


def plru_z_sequence(r: int) -> list[str]:
    rp = plru_registers(r)
    pi_r, pi_0 = plru_pi_sequence(rp, r), plru_pi_sequence(0, r)
    return pi_r + [D] + pi_r + [C] + pi_0 + [F]


def brm_to_plru(machine: BrmMachine, problem: ProblemKind = ProblemKind.HIT) -> ReductionOutput:
    problem = ProblemKind(problem)
    r = machine.registers
    rp = plru_registers(r)

    def gadget(instr: BrmInstr):
        if instr.kind is InstrKind.GUARD:
            return "phi", straight(plru_phi(instr.register, instr.value, r))
        return "psi", straight(plru_psi(instr.register, instr.value, r))

    b = CfgBuilder()
    start = b.node("I_p")
    embed_machine(b, machine, gadget)
    seq_chain(b, start, machine_node(machine.initial), plru_prologue(r), "pro")
    final = machine_node(machine.final)
    if problem is ProblemKind.MISS:
        final = b.node("F_p")
        seq_chain(b, machine_node(machine.final), final, plru_z_sequence(r), "epi")
    return ReductionOutput(with_final(b, start, final), 2 * rp + 2, Policy.PLRU, problem, C,
                           notes={"source": "brm", "registers": r, "encoded_registers": rp,
                                  "blocks": NAMING_NOTE})


def plru_wellformed(state: PlruState, r: int) -> Optional[RegState]:
    """Register values if the lines read ``c, e_0, a_1, e_1, ..., a_r, e_r``."""
    lines = state.lines
    if len(lines) != 2 * r + 2 or lines[0] != C:
        return None
    return _registers(lines, r)


def plru_wellphased(state: PlruState, r: int) -> bool:
    lines = state.lines
    if len(lines) != 2 * r + 2 or _registers(lines, r) is None:
        return False
    x0 = lines[0]
    return x0 == C or any(x0 == a_block(i, v) for i in range(1, r + 1) for v in (False, True))


def _registers(lines, r: int) -> Optional[RegState]:
    if lines[1] != e_block(0):
        return None
    regs = []
    for i in range(1, r + 1):
        if lines[2 * i + 1] != e_block(i):
            return None
        if lines[2 * i] == a_block(i, False):
            regs.append(False)
        elif lines[2 * i] == a_block(i, True):
            regs.append(True)
        else:
            return None
    return tuple(regs)


def plru_arbitrary_prologue(red: ReductionOutput) -> ReductionOutput:
    """Empty-start PLRU instance -> arbitrary-start instance.

    The prologue flushes every initial block, but it leaves the set full of
    dead blocks, and a full set places misses by the tags rather than into
    the leftmost empty line.  Instances that overflow the set can therefore
    change verdict; the transfer is exact only while placement agrees.
    """
    seq = plru_evict_all_sequence(red.ways, block_universe(red.cfg) | {red.query})
    out = prepend(red, seq, "_pro", initial=InitialMode.ARBITRARY)
    return out.with_(notes={**red.notes, "prologue": " ".join(seq)})
