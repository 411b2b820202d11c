"""Undirected graphs (Hamiltonian-circuit inputs) and their edge-list format.

Format::

    n 4
    e 0 1
    e 1 2
"""

from __future__ import annotations

from dataclasses import dataclass


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: frozenset[frozenset[int]]

    def __init__(self, n: int, edges):
        norm = set()
        for u, v in (tuple(e) for e in edges):
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for {n} vertices")
            norm.add(frozenset((u, v)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))

    def adjacent(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def parse_graph(text: str) -> UndirectedGraph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "n" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "e" and len(parts) == 3:
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise GraphFormatError(f"line {lineno}: unknown directive {parts[0]!r}")
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"line {lineno}: expected integers") from None
    if n is None:
        raise GraphFormatError("missing vertex count line")
    try:
        return UndirectedGraph(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def format_graph(g: UndirectedGraph) -> str:
    return "".join([f"n {g.n}\n"] + [f"e {u} {v}\n" for u, v in g.sorted_edges()])
