import itertools

import pytest

from cachereach.brm import brm_reachable, parse_brm
from cachereach.oracles import random_brm
from cachereach.cfg import parse_cfg
from cachereach.policies import (CacheConfig, Outcome, Policy, PlruState,
                                 enumerate_initial_states, plru_pointed_line, run_trace)
from cachereach.reach import InitialMode, ProblemKind
from cachereach.reductions.common import ReductionOutput
from cachereach.reductions.evict import (PLRU_FLUSH_LENGTHS, plru_certified_flush_length,
                                         plru_eviction_bound, plru_eviction_survivor,
                                         plru_foreign_flush_time)
from cachereach.reductions.plru import (brm_to_plru, plru_arbitrary_prologue,
                                        plru_evict_all_sequence, plru_phi, plru_pi_sequence,
                                        plru_prologue, plru_psi, plru_registers,
                                        plru_wellformed, plru_wellphased, plru_z_sequence)

HIT, MISS = ProblemKind.HIT, ProblemKind.MISS
F, T = False, True


def machine(*edges):
    lines = ["registers 1", "node A", "node B", "node C"]
    lines += [f"edge {e}" for e in edges]
    return parse_brm("\n".join(lines + ["init A", "final C"]))


def test_register_padding():
    assert [plru_registers(r) for r in (1, 2, 3, 4)] == [1, 3, 3, 7]
    assert brm_to_plru(machine()).ways == 4


def test_pi_sequence_eight_ways():
    assert plru_pi_sequence(1, 3) == ["e_1", "e_0", "e_2"]
    assert plru_pi_sequence(0, 3) == ["e_0", "e_1", "e_2"]
    with pytest.raises(ValueError):
        plru_pi_sequence(4, 3)


@pytest.mark.parametrize("r", [1, 3])
def test_pi_aims_tags_without_touching_lines(r):
    ways = 2 * plru_registers(r) + 2
    lines = tuple(plru_prologue(r))
    config = CacheConfig(Policy.PLRU, ways)
    for tags in itertools.product((0, 1), repeat=ways - 1):
        for i in range(plru_registers(r) + 1):
            out, outcomes = run_trace(config, PlruState(lines, tags), plru_pi_sequence(i, r))
            assert out.lines == lines
            assert all(o is Outcome.HIT for o in outcomes)
            assert plru_pointed_line(out.tags) == 2 * i


def test_gadget_sequences():
    assert plru_phi(2, T, 3) == ["e_0", "e_1", "e_2", "a_2_t"]
    assert plru_psi(2, F, 3) == ["e_2", "e_3", "e_0", "a_2_f"]
    assert plru_prologue(1) == ["c", "e_0", "a_1_f", "e_1"]
    assert plru_z_sequence(1) == ["e_1", "e_0", "d", "e_1", "e_0", "c", "e_0", "e_1", "f"]


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_assign_then_matching_guard(kind):
    red = brm_to_plru(machine("A B assign 1 t", "B C guard 1 t"), kind)
    assert red.query == "c" and red.decide().answer


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_assign_then_mismatching_guard(kind):
    red = brm_to_plru(machine("A B assign 1 t", "B C guard 1 f"), kind)
    assert not red.decide().answer


@pytest.mark.parametrize("kind", [HIT, MISS])
def test_random_machines_match_oracle(kind):
    seen = set()
    for seed in range(100):
        m = random_brm(seed, max_regs=3, max_edges=10)
        expected = brm_reachable(m)[0]
        seen.add(expected)
        assert brm_to_plru(m, kind).decide().answer == expected, seed
    assert seen == {True, False}


def test_wellformed_predicates():
    tags = (0,) * 7
    good = PlruState(("c", "e_0", "a_1_f", "e_1", "a_2_t", "e_2", "a_3_f", "e_3"), tags)
    assert plru_wellformed(good, 3) == (F, T, F)
    assert plru_wellphased(good, 3)
    shifted = good._replace(lines=("a_1_t",) + good.lines[1:])
    assert plru_wellformed(shifted, 3) is None and plru_wellphased(shifted, 3)
    broken = good._replace(lines=good.lines[:1] + ("e_1",) + good.lines[2:])
    assert plru_wellformed(broken, 3) is None and not plru_wellphased(broken, 3)


# ------------------------------------------------------------- eviction

@pytest.mark.parametrize("ways, length", [(2, 2), (4, 5), (8, 13)])
def test_flush_length_matches_bound(ways, length):
    assert plru_eviction_bound(ways) == length
    assert len(plru_evict_all_sequence(ways)) == length
    assert PLRU_FLUSH_LENGTHS[ways] == length


@pytest.mark.parametrize("ways", [2, 4, 8])
def test_flush_length_certified_and_tight(ways):
    n = plru_eviction_bound(ways)
    assert plru_certified_flush_length(ways) == n
    assert plru_eviction_survivor(ways, n - 1) is not None


def test_foreign_only_adversary_is_weaker():
    assert plru_foreign_flush_time(8) == 12
    assert plru_foreign_flush_time(4) == 5


def test_one_short_fails_for_two_ways():
    lines, tags = plru_eviction_survivor(2, 1)
    assert "F" in lines


def test_four_way_sequence_flushes_concrete_states():
    seq = plru_evict_all_sequence(4)
    config = CacheConfig(Policy.PLRU, 4)
    count = 0
    for init in enumerate_initial_states(config, seq):
        final, _ = run_trace(config, init, seq)
        assert all(b is None or b in seq for b in final.lines), init
        count += 1
    assert count > 1000


def test_evict_sequence_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        plru_evict_all_sequence(3)


def test_evict_sequence_avoids_taken_names():
    seq = plru_evict_all_sequence(2, ["_fresh_1"])
    assert "_fresh_1" not in seq and len(set(seq)) == 2


def test_arbitrary_prologue_shape():
    red = brm_to_plru(machine("A B assign 1 t", "B C guard 1 t"))
    out = plru_arbitrary_prologue(red)
    assert out.initial is InitialMode.ARBITRARY
    assert len(out.cfg.edges) == len(red.cfg.edges) + 5
    assert out.notes["prologue"].split() == plru_evict_all_sequence(4)


OVERFLOW = "\n".join(["node n0", "node n1", "node n2", "node n3", "node n4", "node n5",
                      "edge n0 n1 b0", "edge n1 n2 b1", "edge n2 n3 b2", "edge n3 n4 b1",
                      "edge n4 n5 b3", "start n0", "final n5"])


def test_flushed_set_is_not_an_empty_set():
    # Four distinct blocks never evict b0 from an empty 4-way set, but once the
    # set is full of dead blocks the misses follow the tags and b0 goes first.
    red = ReductionOutput(parse_cfg(OVERFLOW), 4, Policy.PLRU, ProblemKind.MISS, "b0")
    assert not red.decide().answer
    out = plru_arbitrary_prologue(red)
    v = out.decide()
    assert v.answer and v.initial_state == PlruState((None,) * 4, (0, 0, 0))


def test_flushed_set_breaks_a_register_machine_instance():
    m = random_brm(1, max_regs=1, max_edges=3, max_nodes=3)
    red = brm_to_plru(m, MISS)
    assert red.decide().answer and brm_reachable(m)[0]
    assert not plru_arbitrary_prologue(red).decide().answer
