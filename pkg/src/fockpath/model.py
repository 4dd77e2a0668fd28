"""Directed graphs, paths, and the graph-theoretic predicates built on them.

Paths are written right-to-left, like composition of the operators that will
later represent them: the word ``f e`` traverses ``e`` first and then ``f``, so
``s(f e) = s(e)`` and ``r(f e) = r(f)``.  A vertex is the empty word anchored at
that vertex.

Orderings are deterministic everywhere: vertices and edges keep their
declaration order, and path listings are sorted by length and then
lexicographically by the declaration index of each letter.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple

import networkx as nx

from .errors import DanglingEndpoint, DuplicateId, NotComposable, UnknownPath


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    range: str
    color: int | None = None


@dataclass(frozen=True)
class Path:
    """A composable edge word.

    ``edges[0]`` is the last edge traversed, so ``range`` is ``r(edges[0])`` and
    ``source`` is ``s(edges[-1])``.  The empty word is the vertex
    ``range == source``.
    """

    edges: tuple[str, ...]
    range: str
    source: str

    @classmethod
    def vertex(cls, v: str) -> Path:
        return cls((), v, v)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    @property
    def label(self) -> str:
        return " ".join(self.edges) if self.edges else self.range

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    _edge: dict = field(init=False, repr=False, compare=False, hash=False)
    _edge_index: dict = field(init=False, repr=False, compare=False, hash=False)
    _vertex_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        problems_dup, problems_dangling = [], []
        seen: set[str] = set()
        for v in self.vertices:
            if v in seen:
                problems_dup.append(f"duplicate vertex id {v!r}")
            seen.add(v)
        seen_edges: set[str] = set()
        for e in self.edges:
            if e.id in seen_edges:
                problems_dup.append(f"duplicate edge id {e.id!r}")
            seen_edges.add(e.id)
            for end, v in (("source", e.source), ("range", e.range)):
                if v not in seen:
                    problems_dangling.append(f"edge {e.id!r} has undeclared {end} {v!r}")
        if problems_dangling:
            raise DanglingEndpoint(problems_dangling[0], problems_dangling + problems_dup)
        if problems_dup:
            raise DuplicateId(problems_dup[0], problems_dup)
        object.__setattr__(self, "_edge", {e.id: e for e in self.edges})
        object.__setattr__(self, "_edge_index", {e.id: i for i, e in enumerate(self.edges)})
        object.__setattr__(self, "_vertex_index", {v: i for i, v in enumerate(self.vertices)})

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge[edge_id]
        except KeyError:
            raise UnknownPath(f"unknown edge {edge_id!r}") from None

    def edge_index(self, edge_id: str) -> int:
        return self._edge_index[edge_id]

    def vertex_index(self, v: str) -> int:
        return self._vertex_index[v]

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge

    def in_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.range == v]

    def out_edges(self, v: str) -> list[Edge]:
        return [e for e in self.edges if e.source == v]

    def path(self, word: str | Iterable[str]) -> Path:
        """Build a path from a word such as ``"f e"`` or a single vertex id."""
        tokens = word.split() if isinstance(word, str) else list(word)
        if len(tokens) == 1 and tokens[0] in self._vertex_index:
            return Path.vertex(tokens[0])
        if not tokens:
            raise UnknownPath("empty word needs a vertex anchor")
        for t in tokens:
            self.edge(t)
        for left, right in zip(tokens, tokens[1:]):
            if self._edge[left].source != self._edge[right].range:
                raise NotComposable(f"s({left}) != r({right}) in word {' '.join(tokens)!r}")
        return Path(tuple(tokens), self._edge[tokens[0]].range, self._edge[tokens[-1]].source)

    def sort_key(self, p: Path) -> tuple:
        if p.is_vertex:
            return (0, (self._vertex_index[p.range],))
        return (len(p.edges), tuple(self._edge_index[e] for e in p.edges))

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.source, e.range, key=e.id)
        return g


def validate_graph(spec: Mapping[str, Any] | DirectedGraph) -> DirectedGraph:
    """Build a :class:`DirectedGraph` from ``{"vertices": [...], "edges": [...]}``.

    Edges may be ``(id, source, range)`` triples, ``(id, source, range, color)``
    quadruples or mappings with those keys.  Raises :class:`DanglingEndpoint`
    or :class:`DuplicateId`; the exception's ``violations`` lists every problem
    found, not just the first.
    """
    if isinstance(spec, DirectedGraph):
        return spec
    edges = []
    for raw in spec.get("edges", ()):
        if isinstance(raw, Edge):
            edges.append(raw)
        elif isinstance(raw, Mapping):
            edges.append(Edge(raw["id"], raw["source"], raw["range"], raw.get("color")))
        else:
            edges.append(Edge(*raw))
    return DirectedGraph(tuple(spec.get("vertices", ())), tuple(edges))


def concatenate(p: Path, q: Path) -> Path:
    """Return ``pq`` (``q`` first, then ``p``)."""
    if p.source != q.range:
        raise NotComposable(f"s({p.label}) = {p.source} but r({q.label}) = {q.range}")
    return Path(p.edges + q.edges, p.range, q.source)


def enumerate_paths(g: DirectedGraph, max_len: int) -> list[list[Path]]:
    """All paths of length ``<= max_len``, grouped by length, in length-lex order."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    levels = [[Path.vertex(v) for v in g.vertices]]
    for _ in range(max_len):
        prev = levels[-1]
        nxt = []
        # prefixing in edge order over a lex-sorted level keeps the result lex-sorted
        for e in g.edges:
            for mu in prev:
                if mu.range == e.source:
                    nxt.append(Path((e.id,) + mu.edges, e.range, mu.source))
        levels.append(nxt)
    return levels


class RowFiniteness(NamedTuple):
    row_finite: bool
    in_degree: dict[str, int]


def is_row_finite(g: DirectedGraph) -> RowFiniteness:
    # a finite description is always row-finite; the per-vertex counts are the content
    deg = {v: 0 for v in g.vertices}
    for e in g.edges:
        deg[e.range] += 1
    return RowFiniteness(True, deg)


def sources(g: DirectedGraph) -> tuple[str, ...]:
    deg = is_row_finite(g).in_degree
    return tuple(v for v in g.vertices if deg[v] == 0)


def strongly_connected_components(g: DirectedGraph) -> list[tuple[str, ...]]:
    comps = [
        tuple(sorted(c, key=g.vertex_index))
        for c in nx.strongly_connected_components(g.to_networkx())
    ]
    return sorted(comps, key=lambda c: g.vertex_index(c[0]))


class CycleCheck(NamedTuple):
    holds: bool
    witness: Any = None
    edgeless_vertices: tuple[str, ...] = ()


def every_path_lies_on_cycle(g: DirectedGraph) -> CycleCheck:
    """True iff every edge has both endpoints in one strongly connected component.

    A path lies on a cycle exactly when a return path exists from its range to
    its source, which for composable words reduces to the edge condition.  The
    check quantifies over edges only; vertices with no incident edges are
    listed in ``edgeless_vertices`` rather than judged.
    """
    comp_of = {}
    for i, comp in enumerate(strongly_connected_components(g)):
        for v in comp:
            comp_of[v] = i
    touched = {e.source for e in g.edges} | {e.range for e in g.edges}
    edgeless = tuple(v for v in g.vertices if v not in touched)
    for e in g.edges:
        if comp_of[e.source] != comp_of[e.range]:
            return CycleCheck(False, e, edgeless)
    return CycleCheck(True, None, edgeless)


def every_cycle_has_entry(g: DirectedGraph) -> CycleCheck:
    """True iff no cycle runs entirely through vertices of in-degree one.

    An entry to a cycle is another edge into one of its vertices, so a cycle is
    entryless exactly when each of its vertices receives only its cycle edge.
    Following the unique incoming edge backwards from such vertices finds
    every entryless cycle.  The witness is a :class:`Path` around the cycle,
    anchored at the first such vertex in declaration order.
    """
    incoming: dict[str, list[Edge]] = defaultdict(list)
    for e in g.edges:
        incoming[e.range].append(e)
    pred = {v: es[0] for v, es in incoming.items() if len(es) == 1}
    for start in g.vertices:
        if start not in pred:
            continue
        word: list[str] = []
        v = start
        visited = set()
        while v in pred and v not in visited:
            visited.add(v)
            e = pred[v]
            word.append(e.id)
            v = e.source
            if v == start:
                return CycleCheck(False, Path(tuple(word), start, start))
    return CycleCheck(True, None)


def radiating_vertices(g: DirectedGraph) -> tuple[str, ...]:
    """Vertices ``v`` such that every path with range ``v`` also has source ``v``.

    A path into ``v`` ends with an edge into ``v``; if all such edges are loops
    the whole path stays at ``v``, and any non-loop edge into ``v`` is itself a
    counterexample.  So the condition is local.
    """
    return tuple(
        v for v in g.vertices if all(e.source == v for e in g.edges if e.range == v)
    )
