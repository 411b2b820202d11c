"""Register machine to FIFO (and pseudo-RR) exist-hit / exist-miss.

A register state ``v`` is kept as the delay-line word
``a_1 e_2 a_2 ... e_r a_r`` (``a_i`` standing for ``a_{i,v_i}``) in a
``2r-1``-way FIFO set.  Every gadget walks once around the delay line,
rewriting each register slot; a failed guard leaves an ``a``/``e`` pair
swapped, a defect no later gadget can repair.
"""

from __future__ import annotations

import itertools
from typing import Optional

from ..brm import BrmInstr, BrmMachine, InstrKind, RegState
from ..cfg import CfgBuilder, block_universe
from ..policies import Policy
from ..reach import InitialMode, ProblemKind
from .common import (NAMING_NOTE, ReductionOutput, Stage, a_block, e_block, embed_machine,
                     fresh_names, indexed, machine_node, prepend, seq_chain, straight, with_final)

PAD, PAD_ALT = "p", "pp"


def fifo_registers(r: int) -> int:
    """Register count actually encoded: one register gives a 1-way cache in
    which the guard gadget cannot tell ``a`` from ``e``, so pad to two."""
    return max(r, 2)


def fifo_phi(i: int, b: bool) -> tuple[str, ...]:
    return (a_block(i, b), e_block(i), a_block(i, b))


def fifo_psi(i: int, b: bool) -> tuple[str, ...]:
    return (e_block(i), a_block(i, b), e_block(i))


def fifo_gadget_stages(instr: BrmInstr, r: int) -> list[Stage]:
    """Switch stages for one machine edge: position ``instr.register`` is
    fixed, every other position may rewrite its register either way."""
    stages = []
    for j in range(1, r + 1):
        if j == instr.register:
            fixed = fifo_phi if instr.kind is InstrKind.GUARD else fifo_psi
            stages.append([fixed(j, instr.value)])
        else:
            stages.append([fifo_phi(j, False), fifo_phi(j, True)])
    return stages


def fifo_prologue(r: int) -> list[str]:
    seq = [a_block(1, False)]
    for i in range(2, r + 1):
        seq += [e_block(i), a_block(i, False)]
    return seq


def fifo_epilogue_reset(r: int) -> list[str]:
    return [x for i in range(1, r + 1) for x in fifo_psi(i, False)]


def fifo_epilogue_test(r: int) -> list[str]:
    """Keeps ``a_{r,f}`` only when run on the all-false well-formed word."""
    seq = []
    for i in range(1, r + 1):
        if i >= 2:
            seq += [e_block(i), indexed("f", i)]
        if i <= r - 1:
            seq += [a_block(i, False), indexed("g", i)]
    return seq


def fifo_epilogue_invert(r: int, trailing_e: bool = False) -> list[str]:
    """Turns the surviving ``a_{r,f}`` into a miss and its absence into a hit.

    With ``trailing_e`` the sequence ends with an extra ``e_r`` access; in a
    ``2r-1``-way cache that makes ``2r-1`` misses after ``a_{r,f}`` is
    reloaded, which evicts it again, so the default omits it.
    """
    seq = [a_block(r, False)]
    for i in range(1, r):
        seq += [e_block(i), a_block(i, False)]
    return seq + [e_block(r)] if trailing_e else seq


def brm_to_fifo(machine: BrmMachine, problem: ProblemKind = ProblemKind.HIT,
                even_ways: bool = False) -> ReductionOutput:
    problem = ProblemKind(problem)
    r = fifo_registers(machine.registers)
    ways = 2 * r if even_ways else 2 * r - 1

    def gadget(instr: BrmInstr):
        stages = fifo_gadget_stages(instr, r)
        name = "phi" if instr.kind is InstrKind.GUARD else "psi"
        if even_ways:
            stages = straight([PAD_ALT]) + stages + straight([PAD]) + stages
        return name, stages

    b = CfgBuilder()
    start = b.node("I_f")
    embed_machine(b, machine, gadget)
    prologue = fifo_prologue(r)
    reset = fifo_epilogue_reset(r)
    if even_ways:
        prologue = [PAD] + prologue
        reset = [PAD_ALT] + reset + [PAD] + reset + [PAD_ALT]
    seq_chain(b, start, machine_node(machine.initial), prologue, "pro")
    b.node("F_a")
    b.node("F_h")
    seq_chain(b, machine_node(machine.final), "F_a", reset, "epi1")
    seq_chain(b, "F_a", "F_h", fifo_epilogue_test(r), "epi2")
    final = "F_h"
    if problem is ProblemKind.MISS:
        final = b.node("F_f")
        seq_chain(b, "F_h", final, fifo_epilogue_invert(r), "epi3")
    return ReductionOutput(with_final(b, start, final), ways, Policy.FIFO, problem,
                           a_block(r, False),
                           notes={"source": "brm", "registers": machine.registers,
                                  "encoded_registers": r, "even_ways": even_ways,
                                  "blocks": NAMING_NOTE})


# --------------------------------------------------------- state predicates

def _order(shift: int, r: int) -> list[int]:
    return [(shift - 1 + k) % r + 1 for k in range(r)]


def _a_value(block: str, i: int) -> Optional[bool]:
    if block == a_block(i, False):
        return False
    if block == a_block(i, True):
        return True
    return None


def fifo_wellformed(state, r: int) -> Optional[tuple[int, RegState]]:
    """``(shift, registers)`` if ``state`` is a well-formed delay-line word."""
    word = tuple(state)
    if len(word) != 2 * r - 1 or not word:
        return None
    head = word[0]
    for shift in range(1, r + 1):
        if _a_value(head, shift) is not None:
            break
    else:
        return None
    order = _order(shift, r)
    regs: dict[int, bool] = {shift: _a_value(head, shift)}
    pos = 1
    for j in order[1:]:
        if word[pos] != e_block(j):
            return None
        v = _a_value(word[pos + 1], j)
        if v is None:
            return None
        regs[j] = v
        pos += 2
    return shift, tuple(regs[i] for i in range(1, r + 1))


def fifo_wellphased(state, r: int) -> Optional[int]:
    """The shift at which ``state`` is well-phased, or ``None``."""
    word = tuple(state)
    if len(word) != 2 * r - 1 or not word:
        return None
    head = word[0]
    shift = None
    for i in range(1, r + 1):
        if head == e_block(i) or _a_value(head, i) is not None:
            shift = i
            break
    if shift is None:
        return None
    pos = 1
    for j in _order(shift, r)[1:]:
        pair = word[pos:pos + 2]
        ok = ((pair[0] == e_block(j) and _a_value(pair[1], j) is not None)
              or (pair[1] == e_block(j) and _a_value(pair[0], j) is not None))
        if not ok:
            return None
        pos += 2
    return shift


def fifo_wellformed_word(shift: int, regs: RegState) -> tuple[str, ...]:
    r = len(regs)
    order = _order(shift, r)
    word = [a_block(order[0], regs[order[0] - 1])]
    for j in order[1:]:
        word += [e_block(j), a_block(j, regs[j - 1])]
    return tuple(word)


def fifo_wellphased_words(shift: int, r: int):
    """All well-phased words at ``shift``."""
    order = _order(shift, r)
    heads = [e_block(order[0]), a_block(order[0], False), a_block(order[0], True)]
    pair_opts = []
    for j in order[1:]:
        opts = []
        for v in (False, True):
            opts.append((e_block(j), a_block(j, v)))
            opts.append((a_block(j, v), e_block(j)))
        pair_opts.append(opts)
    for h in heads:
        for pairs in itertools.product(*pair_opts):
            yield (h,) + tuple(x for p in pairs for x in p)


# ----------------------------------------------------- arbitrary start, PRR

def fifo_evict_all_prologue(ways: int, taken=()) -> list[str]:
    """``2N-1`` pairwise distinct fresh blocks."""
    return fresh_names(2 * ways - 1, taken)


def fifo_arbitrary_prologue(red: ReductionOutput) -> ReductionOutput:
    """Empty-start FIFO instance -> arbitrary-start instance."""
    seq = fifo_evict_all_prologue(red.ways, block_universe(red.cfg) | {red.query})
    out = prepend(red, seq, "_pro", initial=InitialMode.ARBITRARY)
    return out.with_(notes={**red.notes, "prologue": " ".join(seq)})


def fifo_to_prr(red: ReductionOutput, sets: int = 1, set_index: int = 0) -> ReductionOutput:
    """Move every block of a FIFO instance into one pseudo-RR cache set."""
    if red.policy is not Policy.FIFO:
        raise ValueError("fifo_to_prr expects a FIFO instance")
    if not 0 <= set_index < sets:
        raise ValueError("set index out of range")
    b = CfgBuilder()
    b.copy_graph(red.cfg, relabel=lambda x: f"{set_index}:{x}")
    return red.with_(cfg=with_final(b, red.cfg.start, red.cfg.final), policy=Policy.PRR,
                     sets=sets, query=f"{set_index}:{red.query}",
                     notes={**red.notes, "prr_set": set_index})
