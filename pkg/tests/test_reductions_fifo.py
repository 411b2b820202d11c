import pytest

from cachereach.brm import BrmInstr, BrmMachine, brm_reachable, parse_brm
from cachereach.cfg import CfgBuilder
from cachereach.oracles import random_brm
from cachereach.policies import CacheConfig, Policy, enumerate_initial_states, run_trace
from cachereach.reach import InitialMode, ProblemKind
from cachereach.reductions.common import stage_paths
from cachereach.reductions.evict import fifo_concrete_survivor, fifo_eviction_survivor
from cachereach.reductions.fifo import (brm_to_fifo, fifo_arbitrary_prologue,
                                        fifo_epilogue_invert, fifo_epilogue_reset,
                                        fifo_epilogue_test, fifo_evict_all_prologue,
                                        fifo_gadget_stages, fifo_phi, fifo_prologue,
                                        fifo_registers, fifo_to_prr, fifo_wellformed,
                                        fifo_wellformed_word, fifo_wellphased,
                                        fifo_wellphased_words)

HIT, MISS = ProblemKind.HIT, ProblemKind.MISS
F, T = False, True

ASSIGN = "registers 1\nnode A\nnode B\nedge A B assign 1 t\ninit A\nfinal B"
BLOCKED = "registers 1\nnode A\nnode B\nedge A B guard 1 t\ninit A\nfinal B"


@pytest.mark.parametrize("even", [False, True])
@pytest.mark.parametrize("kind", [HIT, MISS])
def test_single_assign_reachable(kind, even):
    red = brm_to_fifo(parse_brm(ASSIGN), kind, even)
    assert red.decide().answer


@pytest.mark.parametrize("even", [False, True])
@pytest.mark.parametrize("kind", [HIT, MISS])
def test_blocked_guard(kind, even):
    assert not brm_to_fifo(parse_brm(BLOCKED), kind, even).decide().answer


def test_ways_and_query():
    m = random_brm(3, max_regs=3)
    red = brm_to_fifo(BrmMachine(3, m.nodes, (), m.initial, m.final))
    assert (red.ways, red.query, red.policy) == (5, "a_3_f", Policy.FIFO)
    assert brm_to_fifo(parse_brm(ASSIGN)).ways == 3  # one register padded to two
    assert brm_to_fifo(parse_brm(ASSIGN), even_ways=True).ways == 4
    assert fifo_registers(1) == 2 and fifo_registers(3) == 3


def test_sequences():
    assert fifo_prologue(3) == ["a_1_f", "e_2", "a_2_f", "e_3", "a_3_f"]
    assert fifo_epilogue_reset(2) == ["e_1", "a_1_f", "e_1", "e_2", "a_2_f", "e_2"]
    assert fifo_epilogue_test(3) == ["a_1_f", "g_1", "e_2", "f_2", "a_2_f", "g_2", "e_3", "f_3"]
    assert fifo_epilogue_invert(3) == ["a_3_f", "e_1", "a_1_f", "e_2", "a_2_f"]
    assert fifo_epilogue_invert(3, trailing_e=True)[-1] == "e_3"


def test_gadget_paths_fix_register_position():
    stages = fifo_gadget_stages(BrmInstr("guard", 2, T), 3)
    paths = list(stage_paths(stages))
    assert len(paths) == 4
    assert all(p[3:6] == fifo_phi(2, T) for p in paths)


@pytest.mark.parametrize("even", [False, True])
@pytest.mark.parametrize("kind", [HIT, MISS])
def test_random_machines_match_oracle(kind, even):
    seen = set()
    for seed in range(100):
        m = random_brm(seed, max_regs=3, max_edges=10)
        expected = brm_reachable(m)[0]
        seen.add(expected)
        assert brm_to_fifo(m, kind, even).decide().answer == expected, seed
    assert seen == {True, False}


def test_wellformed_instance():
    word = ("a_1_f", "e_2", "a_2_t", "e_3", "a_3_f")
    assert fifo_wellformed(word, 3) == (1, (F, T, F))
    assert fifo_wellphased(word, 3) == 1
    assert fifo_wellformed_word(1, (F, T, F)) == word
    assert fifo_wellformed(fifo_wellformed_word(2, (T, F, T)), 3) == (2, (T, F, T))


def test_failed_guard_gives_phased_only_word():
    word = fifo_wellformed_word(1, (F, F))
    out, _ = run_trace(CacheConfig(Policy.FIFO, 3), word, fifo_phi(1, T))
    assert fifo_wellformed(out, 2) is None
    assert fifo_wellphased(out, 2) is not None


def test_empty_word_is_neither():
    assert fifo_wellformed((), 2) is None and fifo_wellphased((), 2) is None


def test_phased_words_are_phased():
    words = list(fifo_wellphased_words(1, 3))
    assert len(words) == 3 * 4 ** 2
    assert all(fifo_wellphased(w, 3) == 1 for w in words)


# ------------------------------------------------------------- pseudo-RR

def test_prr_sets_one_is_renaming():
    red = brm_to_fifo(parse_brm(ASSIGN))
    out = fifo_to_prr(red)
    assert out.policy is Policy.PRR and out.query == "0:a_2_f"
    assert [e.label and e.label.split(":", 1)[1] for e in out.cfg.edges] == \
        [e.label for e in red.cfg.edges]
    assert out.decide().answer == red.decide().answer


def test_prr_rejects_non_fifo():
    red = brm_to_fifo(parse_brm(ASSIGN)).with_(policy=Policy.LRU)
    with pytest.raises(ValueError):
        fifo_to_prr(red)


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_prr_embedding_preserves_verdict(kind):
    for seed in range(40):
        red = brm_to_fifo(random_brm(seed, max_regs=2, max_edges=6), kind)
        want = red.decide().answer
        assert fifo_to_prr(red, sets=1).decide().answer == want
        assert fifo_to_prr(red, sets=4).decide().answer == want


# --------------------------------------------------- arbitrary-start flush

def test_evict_all_prologue_lengths():
    assert fifo_evict_all_prologue(1) == ["_fresh_1"]
    assert len(set(fifo_evict_all_prologue(4))) == 7


def test_four_way_prologue_flushes_every_initial_state():
    seq = fifo_evict_all_prologue(4)
    config = CacheConfig(Policy.FIFO, 4)
    count = 0
    for init in enumerate_initial_states(config, seq):
        final, _ = run_trace(config, init, seq)
        assert set(final) <= set(seq), init
        count += 1
    assert count > 1000


@pytest.mark.parametrize("ways", range(1, 9))
def test_fifo_flush_length_certified(ways):
    assert fifo_eviction_survivor(ways, 2 * ways - 1) is None
    if ways > 1:
        assert fifo_eviction_survivor(ways, 2 * ways - 2) is not None


def test_two_way_tightness_probe():
    assert fifo_concrete_survivor(2, 3) is None
    survivor = fifo_concrete_survivor(2, 2)
    assert survivor is not None
    final, _ = run_trace(CacheConfig(Policy.FIFO, 2), survivor, ["_fresh_1", "_fresh_2"])
    assert any(not b.startswith("_fresh_") for b in final)


def test_arbitrary_prologue_equivalence():
    for seed in range(30):
        for kind in (HIT, MISS):
            red = brm_to_fifo(random_brm(seed, max_regs=1, max_edges=3, max_nodes=3), kind)
            out = fifo_arbitrary_prologue(red)
            assert out.initial is InitialMode.ARBITRARY
            assert out.decide().answer == red.decide().answer, (seed, kind)


def _with_trailing_e(red):
    b = CfgBuilder()
    b.copy_graph(red.cfg)
    b.node("F_e")
    b.edge(red.cfg.final, "F_e", f"e_{red.notes['encoded_registers']}")
    b.start, b.final = red.cfg.start, "F_e"
    return red.with_(cfg=b.build())


@pytest.mark.parametrize("seed", [7, 53, 72])
def test_trailing_e_makes_unreachable_machines_miss(seed):
    m = random_brm(seed)
    red = brm_to_fifo(m, MISS)
    assert not brm_reachable(m)[0] and not red.decide().answer
    assert _with_trailing_e(red).decide().answer
