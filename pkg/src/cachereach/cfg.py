"""Control-flow graphs whose edges carry memory-block accesses.

A graph is a directed multigraph with a start and a final node.  Each edge
either accesses one memory block (its label) or is an epsilon edge that
leaves the cache untouched.  Graphs are immutable once built; use
:class:`CfgBuilder` to assemble them programmatically or :func:`parse_cfg`
to read the line-oriented text format::

    # comment
    node S
    node F
    edge S F a        # access block a
    edge F F          # epsilon self-loop
    start S
    final F
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional

BLOCK_RE = re.compile(r"^[A-Za-z0-9_.:-]+$")
NODE_RE = re.compile(r"^[^\s#]+$")

EPSILON = "ε"


class CfgError(ValueError):
    """Raised for malformed CFG documents or invalid graph construction."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    label: Optional[str] = None

    @property
    def is_epsilon(self) -> bool:
        return self.label is None

    def __str__(self) -> str:
        return f"{self.src} -> {self.dst} [{self.label if self.label is not None else EPSILON}]"


@dataclass(frozen=True)
class Cfg:
    """Immutable control-flow graph.

    ``nodes`` and ``edges`` keep insertion order, which fixes the iteration
    order used by the search (and therefore which witness is returned).
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    start: str
    final: str

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        return {n: tuple(es) for n, es in out.items()}

    @cached_property
    def node_set(self) -> frozenset[str]:
        return frozenset(self.nodes)

    def successors(self, node: str) -> tuple[Edge, ...]:
        return self.out_edges.get(node, ())

    def with_endpoints(self, start: Optional[str] = None, final: Optional[str] = None) -> "Cfg":
        return Cfg(self.nodes, self.edges,
                   self.start if start is None else start,
                   self.final if final is None else final)

    def __len__(self) -> int:
        return len(self.nodes) + len(self.edges)


class CfgBuilder:
    """Mutable helper for assembling a :class:`Cfg`."""

    def __init__(self):
        self._nodes: dict[str, None] = {}
        self._edges: list[Edge] = []
        self.start: Optional[str] = None
        self.final: Optional[str] = None
        self._fresh = 0

    def node(self, name: str) -> str:
        if name in self._nodes:
            raise CfgError(f"duplicate node {name!r}")
        self._nodes[name] = None
        return name

    def ensure_node(self, name: str) -> str:
        self._nodes.setdefault(name, None)
        return name

    def has_node(self, name: str) -> bool:
        return name in self._nodes

    def fresh_node(self, prefix: str) -> str:
        while True:
            name = f"{prefix}{self._fresh}"
            self._fresh += 1
            if name not in self._nodes:
                return self.node(name)

    def edge(self, src: str, dst: str, label: Optional[str] = None) -> Edge:
        for n in (src, dst):
            if n not in self._nodes:
                raise CfgError(f"edge references undeclared node {n!r}")
        if label is not None and not BLOCK_RE.match(label):
            raise CfgError(f"invalid block name {label!r}")
        e = Edge(src, dst, label)
        self._edges.append(e)
        return e

    def chain(self, src: str, labels: Iterable[Optional[str]], dst: Optional[str] = None,
              prefix: Optional[str] = None) -> str:
        """Add a straight-line path accessing ``labels`` in order.

        Intermediate nodes are named ``<prefix><k>``.  Returns the node at the
        end of the chain (``dst`` if given; an empty label list then needs an
        epsilon edge to reach it).
        """
        labels = list(labels)
        prefix = prefix if prefix is not None else f"{src}/"
        cur = src
        if not labels:
            if dst is not None and dst != src:
                self.edge(src, dst)
                return dst
            return src
        for k, lab in enumerate(labels):
            last = k == len(labels) - 1
            if last and dst is not None:
                nxt = dst
            else:
                nxt = self.node(f"{prefix}{k}") if f"{prefix}{k}" not in self._nodes else self.fresh_node(prefix)
            self.edge(cur, nxt, lab)
            cur = nxt
        return cur

    def copy_graph(self, cfg: Cfg, rename=lambda n: n, relabel=lambda b: b) -> None:
        for n in cfg.nodes:
            self.node(rename(n))
        for e in cfg.edges:
            self.edge(rename(e.src), rename(e.dst), None if e.label is None else relabel(e.label))

    def build(self) -> Cfg:
        if self.start is None or self.final is None:
            raise CfgError("start and final must be set")
        return Cfg(tuple(self._nodes), tuple(self._edges), self.start, self.final)


def parse_cfg(text: str) -> Cfg:
    """Parse the CFG text format.  Raises :class:`CfgError` with a line number."""
    b = CfgBuilder()
    start = final = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw, args = parts[0], parts[1:]
        try:
            if kw == "node":
                if len(args) != 1 or not NODE_RE.match(args[0]):
                    raise CfgError("expected: node <id>")
                b.node(args[0])
            elif kw == "edge":
                if len(args) not in (2, 3):
                    raise CfgError("expected: edge <src> <dst> [<block>]")
                b.edge(args[0], args[1], args[2] if len(args) == 3 else None)
            elif kw in ("start", "final"):
                if len(args) != 1:
                    raise CfgError(f"expected: {kw} <id>")
                if (start if kw == "start" else final) is not None:
                    raise CfgError(f"{kw} declared twice")
                if kw == "start":
                    start = args[0]
                else:
                    final = args[0]
            else:
                raise CfgError(f"unknown directive {kw!r}")
        except CfgError as exc:
            if exc.line is not None:
                raise
            raise CfgError(str(exc), lineno) from None
    if start is None:
        raise CfgError("missing start declaration")
    if final is None:
        raise CfgError("missing final declaration")
    for n, what in ((start, "start"), (final, "final")):
        if not b.has_node(n):
            raise CfgError(f"{what} node {n!r} undeclared")
    b.start, b.final = start, final
    return b.build()


def serialize_cfg(cfg: Cfg) -> str:
    lines = [f"node {n}" for n in cfg.nodes]
    for e in cfg.edges:
        lines.append(f"edge {e.src} {e.dst}" + (f" {e.label}" if e.label is not None else ""))
    lines.append(f"start {cfg.start}")
    lines.append(f"final {cfg.final}")
    return "\n".join(lines) + "\n"


def validate(cfg: Cfg) -> list[str]:
    """Return the list of invariant violations (empty when the graph is valid)."""
    problems = []
    seen = set()
    for n in cfg.nodes:
        if n in seen:
            problems.append(f"duplicate node {n}")
        seen.add(n)
        if not NODE_RE.match(n):
            problems.append(f"invalid node id {n!r}")
    if cfg.start not in seen:
        problems.append("start undeclared")
    if cfg.final not in seen:
        problems.append("final undeclared")
    for i, e in enumerate(cfg.edges):
        if e.src not in seen:
            problems.append(f"edge {i}: source {e.src} undeclared")
        if e.dst not in seen:
            problems.append(f"edge {i}: target {e.dst} undeclared")
        if e.label is not None and not BLOCK_RE.match(e.label):
            problems.append(f"edge {i}: invalid block name {e.label!r}")
    return problems


def reachable_nodes(cfg: Cfg, source: Optional[str] = None) -> set[str]:
    source = cfg.start if source is None else source
    seen = {source}
    todo = deque([source])
    while todo:
        n = todo.popleft()
        for e in cfg.successors(n):
            if e.dst not in seen:
                seen.add(e.dst)
                todo.append(e.dst)
    return seen


def is_acyclic(cfg: Cfg) -> bool:
    return topological_order(cfg) is not None


def topological_order(cfg: Cfg) -> Optional[list[str]]:
    indeg = {n: 0 for n in cfg.nodes}
    for e in cfg.edges:
        indeg[e.dst] = indeg.get(e.dst, 0) + 1
    todo = deque(n for n in cfg.nodes if indeg[n] == 0)
    order = []
    while todo:
        n = todo.popleft()
        order.append(n)
        for e in cfg.successors(n):
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                todo.append(e.dst)
    return order if len(order) == len(indeg) else None


def graph_flags(cfg: Cfg) -> set[str]:
    """Informational properties that are not violations: ``acyclic``, ``final-unreachable``."""
    flags = set()
    if is_acyclic(cfg):
        flags.add("acyclic")
    if cfg.final not in reachable_nodes(cfg):
        flags.add("final-unreachable")
    return flags


def block_universe(cfg: Cfg) -> set[str]:
    return {e.label for e in cfg.edges if e.label is not None}


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _layers(cfg: Cfg) -> Optional[dict[str, int]]:
    order = topological_order(cfg)
    if order is None:
        return None
    reach = reachable_nodes(cfg)
    layer: dict[str, int] = {cfg.start: 0}
    preds: dict[str, list[str]] = {n: [] for n in cfg.nodes}
    for e in cfg.edges:
        preds[e.dst].append(e.src)
    for n in order:
        if n in reach and n != cfg.start:
            layer[n] = max(layer[p] for p in preds[n] if p in layer) + 1
    # nodes off the start's cone: hang them next to a placed neighbour
    changed = True
    while changed:
        changed = False
        for n in order:
            if n in layer:
                continue
            placed_p = [layer[p] for p in preds[n] if p in layer]
            placed_s = [layer[e.dst] for e in cfg.successors(n) if e.dst in layer]
            if placed_p:
                layer[n] = max(placed_p) + 1
            elif placed_s:
                layer[n] = min(placed_s) - 1
            else:
                continue
            changed = True
    return layer


def emit_dot(cfg: Cfg, name: str = "cfg") -> str:
    """Render the graph as a deterministic GraphViz digraph.

    Acyclic graphs get ``rank=same`` groups by layer (longest distance from
    the start node), which reproduces the layered drawing of reduction
    outputs.
    """
    out = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", "  node [shape=circle];",
           '  __start [shape=point, label=""];']
    for n in cfg.nodes:
        attrs = []
        if n == cfg.final:
            attrs.append("shape=doublecircle")
        if n == cfg.start:
            attrs.append("style=bold")
        out.append(f"  {_dot_id(n)}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    out.append(f"  __start -> {_dot_id(cfg.start)};")
    for e in cfg.edges:
        label = EPSILON if e.label is None else e.label
        style = ", style=dashed" if e.label is None else ""
        out.append(f"  {_dot_id(e.src)} -> {_dot_id(e.dst)} [label={_dot_id(label)}{style}];")
    layers = _layers(cfg)
    if layers:
        groups: dict[int, list[str]] = {}
        for n in cfg.nodes:
            if n in layers:
                groups.setdefault(layers[n], []).append(n)
        for k in sorted(groups):
            out.append("  { rank=same; " + " ".join(_dot_id(n) + ";" for n in groups[k]) + " }")
    out.append("}")
    return "\n".join(out) + "\n"


def iter_paths(cfg: Cfg, max_len: int, source: Optional[str] = None) -> Iterator[tuple[Edge, ...]]:
    """Every edge path from ``source`` (default: start) of length <= max_len, depth first."""
    source = cfg.start if source is None else source
    stack: list[tuple[str, tuple[Edge, ...]]] = [(source, ())]
    while stack:
        node, path = stack.pop()
        yield path
        if len(path) < max_len:
            for e in reversed(cfg.successors(node)):
                stack.append((e.dst, path + (e,)))
