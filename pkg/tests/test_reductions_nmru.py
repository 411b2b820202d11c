import pytest

from cachereach.brm import BrmInstr, brm_reachable, parse_brm
from cachereach.oracles import random_brm
from cachereach.policies import CacheConfig, Policy, render, run_trace
from cachereach.reach import ProblemKind
from cachereach.reductions.common import stage_paths
from cachereach.reductions.nmru import (brm_to_nmru, nmru_epilogue_invert, nmru_epilogue_test,
                                        nmru_gadget_stages, nmru_prologue, nmru_ways,
                                        nmru_wellformed, nmru_wellphased)

HIT, MISS = ProblemKind.HIT, ProblemKind.MISS
F, T = False, True

ASSIGN = "registers 1\nnode A\nnode B\nedge A B assign 1 t\ninit A\nfinal B"
BLOCKED = "registers 1\nnode A\nnode B\nedge A B guard 1 t\ninit A\nfinal B"


def encoded(r, regs=None, step=0):
    regs = regs or (F,) * r
    left = [(f"e_{i}", 0) for i in range(1, r + 1)]
    right = [(f"a_{i}_{'t' if v else 'f'}", 0) for i, v in enumerate(regs, 1)]
    return tuple(left + [("d", 0)] + right + [("g_0", step), ("g_1", 1 - step)])


def test_ways_and_sequences():
    assert nmru_ways(2) == 7
    assert nmru_prologue(2) == ["e_1", "e_2", "d", "a_1_f", "a_2_f", "g_0", "g_1"]
    assert nmru_epilogue_test(2) == ["a_1_f", "a_2_f", "c_1", "c_2"]
    assert nmru_epilogue_invert(2) == ["d", "g_0", "c_1", "c_2", "a_1_t"]
    red = brm_to_nmru(parse_brm(ASSIGN))
    assert (red.ways, red.query, red.policy) == (5, "d", Policy.NMRU)


def test_prologue_builds_encoding():
    r = 2
    out, _ = run_trace(CacheConfig(Policy.NMRU, nmru_ways(r)), (), nmru_prologue(r))
    assert out == encoded(r)
    assert render(out) == "e_1^0 e_2^0 d^0 a_1_f^0 a_2_f^0 g_0^0 g_1^1"


def test_gadget_shape():
    stages = nmru_gadget_stages(BrmInstr("guard", 1, T), 2)
    paths = list(stage_paths(stages))
    assert len(paths) == 4  # register 2 is free in each half
    assert all(p.count("g_0") == 1 and p[-1] == "g_1" for p in paths)
    assert all(p[0] == "d" and p[1] == "a_1_t" for p in paths)
    psi = list(stage_paths(nmru_gadget_stages(BrmInstr("assign", 2, F), 2)))
    assert all(p[:1] == ("d",) and p[4] == "a_2_f" for p in psi)


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_single_assign(kind):
    assert brm_to_nmru(parse_brm(ASSIGN), kind).decide().answer


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_blocked_guard(kind):
    assert not brm_to_nmru(parse_brm(BLOCKED), kind).decide().answer


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_random_machines_match_oracle(kind):
    seen = set()
    for seed in range(100):
        m = random_brm(seed, max_regs=2, max_edges=6)
        expected = brm_reachable(m)[0]
        seen.add(expected)
        assert brm_to_nmru(m, kind).decide().answer == expected, seed
    assert seen == {True, False}


def test_wellformed_encoding():
    assert nmru_wellformed(encoded(3), 3, 0) == (F, F, F)
    assert nmru_wellphased(encoded(3), 3, 0)
    assert nmru_wellformed(encoded(2, (T, F), 1), 2, 1) == (T, F)


def test_a_block_left_of_d_is_phased_only():
    s = list(encoded(2))
    s[0], s[3] = s[3], s[0]
    assert nmru_wellformed(tuple(s), 2) is None
    assert nmru_wellphased(tuple(s), 2)


def test_wrong_g_parity_is_neither():
    s = encoded(2, step=1)
    assert nmru_wellformed(s, 2, 0) is None and not nmru_wellphased(s, 2, 0)


def test_set_mru_bit_is_neither():
    s = list(encoded(2))
    s[0] = (s[0][0], 1)
    assert nmru_wellformed(tuple(s), 2) is None and not nmru_wellphased(tuple(s), 2)
