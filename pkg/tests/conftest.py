import sys
from pathlib import Path

import pytest

from cachereach.cnf import CnfFormula, parse_dimacs
from cachereach.ugraph import UndirectedGraph, parse_graph

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def three_var_cnf() -> CnfFormula:
    """(not c or b or a) and (not c or not b or not a) and (c or b or not a)."""
    return parse_dimacs((DATA / "three_var.cnf").read_text())


@pytest.fixture
def contradiction_cnf() -> CnfFormula:
    return CnfFormula(1, ((1,), (-1,)))


@pytest.fixture
def four_vertex_graph() -> UndirectedGraph:
    return parse_graph((DATA / "four_vertex.graph").read_text())


@pytest.fixture
def path3_graph() -> UndirectedGraph:
    return UndirectedGraph(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> UndirectedGraph:
    return UndirectedGraph(3, [(0, 1), (1, 2), (0, 2)])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number].line)
