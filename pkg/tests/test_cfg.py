import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachereach.cfg import (EPSILON, Cfg, CfgBuilder, CfgError, Edge, block_universe, emit_dot,
                            graph_flags, is_acyclic, iter_paths, parse_cfg, reachable_nodes,
                            serialize_cfg, topological_order, validate)
from cachereach.oracles import random_cfg
from cachereach.reductions.lru import ham_to_lru_miss, sat_to_lru_hit

MINIMAL = "node S\nnode F\nedge S F a\nstart S\nfinal F"


def test_parse_minimal_document():
    cfg = parse_cfg(MINIMAL)
    assert cfg.nodes == ("S", "F")
    assert cfg.edges == (Edge("S", "F", "a"),)
    assert (cfg.start, cfg.final) == ("S", "F")


def test_parse_comments_and_epsilon():
    cfg = parse_cfg("# header\nnode S  # entry\nnode F\nedge S F\nedge F F b\nstart S\nfinal F\n")
    assert cfg.edges[0].is_epsilon
    assert cfg.edges[1] == Edge("F", "F", "b")


@pytest.mark.parametrize("text, fragment", [
    ("edge S F a\nstart S\nfinal F", "undeclared node"),
    ("node S\nnode S\nstart S\nfinal S", "duplicate node"),
    ("node S\nfinal S", "missing start"),
    ("node S\nstart S", "missing final"),
    ("node S\nloop S\nstart S\nfinal S", "unknown directive"),
    ("node S\nedge S S a b c\nstart S\nfinal S", "expected: edge"),
    ("node S\nedge S S a!\nstart S\nfinal S", "invalid block name"),
    ("node S\nstart S\nstart S\nfinal S", "declared twice"),
    ("node S\nstart T\nfinal S", "undeclared"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(CfgError, match=fragment):
        parse_cfg(text)


def test_parse_error_reports_line_number():
    with pytest.raises(CfgError) as info:
        parse_cfg("node S\n\nedge S X a\nstart S\nfinal S")
    assert info.value.line == 3


def test_three_variable_reduction_graph_shape(three_var_cnf):
    cfg = sat_to_lru_hit(three_var_cnf).cfg
    text = serialize_cfg(cfg)
    again = parse_cfg(text)
    assert len(again.nodes) == 8
    assert block_universe(again) == {"x", "b_1_t", "b_1_f", "b_2_t", "b_2_f", "b_3_t", "b_3_f"}
    # one switch of two parallel edges per variable
    assert sorted(e.label for e in again.edges if e.src == "S") == ["b_1_f", "b_1_t"]


def test_validate():
    assert validate(parse_cfg(MINIMAL)) == []
    bad = Cfg(("F",), (), "S", "F")
    assert validate(bad) == ["start undeclared"]
    dangling = Cfg(("S",), (Edge("S", "T", "a"),), "S", "S")
    assert any("target T undeclared" in p for p in validate(dangling))


def test_unreachable_final_is_a_flag_not_a_violation():
    cfg = parse_cfg("node S\nnode F\nedge F S a\nstart S\nfinal F")
    assert validate(cfg) == []
    assert "final-unreachable" in graph_flags(cfg)
    assert "final-unreachable" not in graph_flags(parse_cfg(MINIMAL))


def test_acyclicity_and_topological_order():
    cfg = parse_cfg(MINIMAL)
    assert is_acyclic(cfg) and topological_order(cfg) == ["S", "F"]
    loop = parse_cfg("node S\nedge S S a\nstart S\nfinal S")
    assert not is_acyclic(loop) and topological_order(loop) is None
    assert "acyclic" in graph_flags(cfg) and "acyclic" not in graph_flags(loop)


def test_block_universe():
    assert block_universe(parse_cfg(MINIMAL)) == {"a"}
    assert block_universe(parse_cfg("node S\nnode F\nedge S F\nstart S\nfinal F")) == set()


def test_builder_rejects_duplicates_and_undeclared():
    b = CfgBuilder()
    b.node("S")
    with pytest.raises(CfgError):
        b.node("S")
    with pytest.raises(CfgError):
        b.edge("S", "T", "a")
    with pytest.raises(CfgError):
        b.build()


def test_builder_chain_names_intermediate_nodes():
    b = CfgBuilder()
    b.node("S"), b.node("F")
    end = b.chain("S", ["a", "b", "c"], "F", prefix="p")
    b.start, b.final = "S", "F"
    cfg = b.build()
    assert end == "F"
    assert [e.label for e in cfg.edges] == ["a", "b", "c"]
    assert cfg.nodes == ("S", "F", "p0", "p1")


def test_builder_empty_chain_is_epsilon():
    b = CfgBuilder()
    b.node("S"), b.node("F")
    b.chain("S", [], "F")
    b.start, b.final = "S", "F"
    assert b.build().edges == (Edge("S", "F", None),)


def test_dot_minimal():
    dot = emit_dot(parse_cfg(MINIMAL))
    assert dot.startswith("digraph")
    assert dot.count("->") == 2  # start marker plus the single edge
    assert '"S" -> "F" [label="a"]' in dot
    assert '"F" [shape=doublecircle]' in dot


def test_dot_epsilon_and_parallel_edges():
    cfg = parse_cfg("node S\nnode F\nedge S F a\nedge S F a\nedge S F\nstart S\nfinal F")
    dot = emit_dot(cfg)
    assert dot.count('"S" -> "F" [label="a"]') == 2
    assert f'label="{EPSILON}", style=dashed' in dot


def test_dot_layers_of_hamiltonian_reduction(four_vertex_graph):
    red = ham_to_lru_miss(four_vertex_graph)
    dot = emit_dot(red.cfg)
    ranks = [line for line in dot.splitlines() if "rank=same" in line]
    # start, v_0_0, three inner layers of three vertices, v_0_4
    assert len(ranks) == 6
    assert ranks[2].count(";") - 1 == 3
    assert emit_dot(red.cfg) == dot


def test_iter_paths_counts():
    cfg = parse_cfg("node S\nnode F\nedge S F a\nedge S F b\nstart S\nfinal F")
    paths = list(iter_paths(cfg, 1))
    assert len(paths) == 3  # empty path plus two single edges


def test_reachable_nodes():
    cfg = parse_cfg("node S\nnode A\nnode F\nedge S A a\nedge F S\nstart S\nfinal F")
    assert reachable_nodes(cfg) == {"S", "A"}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_serialize_roundtrip(seed, cycles):
    cfg = random_cfg(seed, allow_cycles=cycles)
    assert parse_cfg(serialize_cfg(cfg)) == cfg
    assert block_universe(cfg) == {e.label for e in cfg.edges} - {None}
    assert validate(cfg) == []
