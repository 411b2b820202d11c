"""Register machine to NMRU exist-hit / exist-miss.

Registers live to the right of ``d`` as ``a_{i,v_i}`` blocks, the ``e``
blocks to its left.  A gadget half re-touches every block with ``d`` first;
a wrong guard choice lets an ``a`` block land left of ``d``, and the
epilogue turns any such misplacement into the eviction of ``d``.
"""

from __future__ import annotations

from typing import Optional

from ..brm import BrmInstr, BrmMachine, InstrKind, RegState
from ..cfg import CfgBuilder
from ..policies import Policy
from ..reach import ProblemKind
from .common import (NAMING_NOTE, ReductionOutput, Stage, a_block, e_block, embed_machine,
                     indexed, machine_node, seq_chain, straight, with_final, build_stages)

D = "d"
G0, G1 = "g_0", "g_1"


def nmru_ways(r: int) -> int:
    return 2 * r + 3


def _switches(r: int, fixed: Optional[tuple[int, bool]], skip: Optional[int]) -> list[Stage]:
    stages = []
    for j in range(1, r + 1):
        if j == skip:
            continue
        if fixed is not None and j == fixed[0]:
            stages.append([(a_block(j, fixed[1]),)])
        else:
            stages.append([(a_block(j, False),), (a_block(j, True),)])
    return stages


def nmru_phi_stages(i: int, b: bool, r: int) -> list[Stage]:
    return (straight([D]) + _switches(r, (i, b), None)
            + straight(e_block(j) for j in range(1, r + 1)))


def nmru_psi_stages(i: int, b: bool, r: int) -> list[Stage]:
    return (straight([D]) + _switches(r, None, i)
            + straight(e_block(j) for j in range(1, r + 1)) + straight([a_block(i, b)]))


def nmru_gadget_stages(instr: BrmInstr, r: int) -> list[Stage]:
    half = (nmru_phi_stages if instr.kind is InstrKind.GUARD else nmru_psi_stages)(
        instr.register, instr.value, r)
    return half + straight([G0]) + half + straight([G1])


def nmru_prologue(r: int) -> list[str]:
    return ([e_block(i) for i in range(1, r + 1)] + [D]
            + [a_block(i, False) for i in range(1, r + 1)] + [G0, G1])


def nmru_epilogue_test(r: int) -> list[str]:
    return [a_block(i, False) for i in range(1, r + 1)] + [indexed("c", i) for i in range(1, r + 1)]


def nmru_epilogue_invert(r: int) -> list[str]:
    return [D, G0] + [indexed("c", i) for i in range(1, r + 1)] + [a_block(1, True)]


def brm_to_nmru(machine: BrmMachine, problem: ProblemKind = ProblemKind.HIT) -> ReductionOutput:
    problem = ProblemKind(problem)
    r = machine.registers

    def gadget(instr: BrmInstr):
        name = "phi" if instr.kind is InstrKind.GUARD else "psi"
        return name, nmru_gadget_stages(instr, r)

    b = CfgBuilder()
    start = b.node("I_f")
    embed_machine(b, machine, gadget)
    seq_chain(b, start, machine_node(machine.initial), nmru_prologue(r), "pro")
    reset: list[Stage] = []
    for j in range(1, r + 1):
        reset += nmru_gadget_stages(BrmInstr(InstrKind.ASSIGN, j, False), r)
    b.node("F_a")
    b.node("F_h")
    build_stages(b, machine_node(machine.final), "F_a", reset, "epi1")
    seq_chain(b, "F_a", "F_h", nmru_epilogue_test(r), "epi2")
    final = "F_h"
    if problem is ProblemKind.MISS:
        final = b.node("F_f")
        seq_chain(b, "F_h", final, nmru_epilogue_invert(r), "epi3")
    return ReductionOutput(with_final(b, start, final), nmru_ways(r), Policy.NMRU, problem, D,
                           notes={"source": "brm", "registers": r, "blocks": NAMING_NOTE})


# --------------------------------------------------------- state predicates

def _split(state, r: int, step: int):
    """``(left, right)`` halves around ``d`` if the frame matches, else None."""
    if len(state) != 2 * r + 3:
        return None
    if state[r] != (D, 0) or state[2 * r + 1] != (G0, step) or state[2 * r + 2] != (G1, 1 - step):
        return None
    left, right = state[:r], state[r + 1:2 * r + 1]
    if any(bit for _, bit in left + right):
        return None
    return [blk for blk, _ in left], [blk for blk, _ in right]


def _a_register(block: str, r: int) -> Optional[tuple[int, bool]]:
    parts = block.split("_")
    if len(parts) == 3 and parts[0] == "a" and parts[2] in ("f", "t") and parts[1].isdigit():
        i = int(parts[1])
        if 1 <= i <= r:
            return i, parts[2] == "t"
    return None


def nmru_wellformed(state, r: int, step: int = 0) -> Optional[RegState]:
    halves = _split(state, r, step)
    if halves is None:
        return None
    left, right = halves
    if sorted(left) != sorted(e_block(i) for i in range(1, r + 1)):
        return None
    regs = {}
    for blk in right:
        ar = _a_register(blk, r)
        if ar is None or ar[0] in regs:
            return None
        regs[ar[0]] = ar[1]
    return tuple(regs[i] for i in range(1, r + 1))


def nmru_wellphased(state, r: int, step: int = 0) -> bool:
    halves = _split(state, r, step)
    if halves is None:
        return False
    blocks = halves[0] + halves[1]
    es = sorted(x for x in blocks if x.startswith("e_"))
    if es != sorted(e_block(i) for i in range(1, r + 1)):
        return False
    regs = [_a_register(x, r) for x in blocks if not x.startswith("e_")]
    if any(x is None for x in regs):
        return False
    return sorted(i for i, _ in regs) == list(range(1, r + 1))
