"""Certified path structures: the common interface consumed by the Fock module.

A :class:`PathStructure` couples a generating graph with a rewriting system
whose normal forms name the morphisms, plus a record of which checks were
passed.  ``certified_length`` is ``None`` when normal forms are valid at every
length (free graphs, or rewriting systems whose critical pairs all resolve),
otherwise the largest length the checks covered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import UpstreamUnchecked
from ..model import DirectedGraph, Path
from .category import (
    CategoryPresentation,
    build_rewriting_system,
    check_cancellation,
    check_confluence,
    check_no_inverses,
    has_nondegenerate_degree,
    reduce_path,
)
from .kgraph import KGraphSkeleton, check_factorization, kgraph_rewriting_system
from .rewriting import RewriteSystem


@dataclass(frozen=True, eq=False)
class PathStructure:
    kind: str
    graph: DirectedGraph
    rewriting: RewriteSystem | None
    source: object
    certified_length: int | None
    certificate: tuple = ()
    _degrees: dict | None = field(default=None, compare=False, hash=False)

    @property
    def degrees(self) -> dict[str, tuple[int, ...]] | None:
        return self._degrees

    def normal_form(self, p: Path) -> Path:
        return p if self.rewriting is None else reduce_path(self.rewriting, p)

    def path(self, word: str | Iterable[str] | Path) -> Path:
        p = word if isinstance(word, Path) else self.graph.path(word)
        return self.normal_form(p)

    def compose(self, p: Path, q: Path) -> Path | None:
        if p.source != q.range:
            return None
        return self.normal_form(Path(p.edges + q.edges, p.range, q.source))

    def degree(self, p: Path) -> tuple[int, ...]:
        if self._degrees is None:
            return (len(p),)
        k = len(next(iter(self._degrees.values()), (0,)))
        d = [0] * k
        for e in p.edges:
            for i, x in enumerate(self._degrees[e]):
                d[i] += x
        return tuple(d)

    def level(self, p: Path) -> int:
        return sum(self.degree(p))

    @property
    def length_preserving(self) -> bool:
        return self.rewriting is None or all(len(l) == len(r) for l, r in self.rewriting.rules)

    def classes(self, max_level: int) -> list[Path]:
        """All normal forms of level ``<= max_level``, ordered by level then lex."""
        seen = {Path.vertex(v) for v in self.graph.vertices}
        frontier = list(seen)
        while frontier:
            nxt = []
            for mu in frontier:
                for e in self.graph.edges:
                    if e.source != mu.range:
                        continue
                    nu = self.normal_form(Path((e.id,) + mu.edges, e.range, mu.source))
                    if nu not in seen and self.level(nu) <= max_level:
                        seen.add(nu)
                        nxt.append(nu)
            frontier = nxt
        return sorted(seen, key=lambda p: (self.level(p),) + self.graph.sort_key(p))

    def is_acyclic(self) -> bool:
        """True when the morphism set is finite (no closed walk in the generators)."""
        import networkx as nx

        return nx.is_directed_acyclic_graph(nx.DiGraph(self.graph.to_networkx()))


def from_graph(g: DirectedGraph) -> PathStructure:
    return PathStructure("graph", g, None, g, None, (("free", True),))


def certify(obj: DirectedGraph | KGraphSkeleton | CategoryPresentation, bound: int = 6) -> PathStructure:
    """Run the upstream checks for ``obj`` and wrap it as a :class:`PathStructure`.

    Raises :class:`UpstreamUnchecked` (carrying the failing reports) when a
    check fails.
    """
    if isinstance(obj, PathStructure):
        return obj
    if isinstance(obj, DirectedGraph):
        return from_graph(obj)
    if isinstance(obj, KGraphSkeleton):
        fact = check_factorization(obj, (1,) * obj.rank)
        if not fact.ok:
            raise UpstreamUnchecked("factorization check failed", [fact])
        system = kgraph_rewriting_system(obj)
        certified = None if system.complete else bound
        if certified is not None:
            deep = check_factorization(obj, (bound,) * obj.rank)
            if not deep.ok:
                raise UpstreamUnchecked("factorization check failed", [deep])
        degrees = {e.id: tuple(int(c == e.color) for c in range(1, obj.rank + 1)) for e in obj.graph.edges}
        return PathStructure(
            "kgraph", obj.graph, system, obj, certified,
            (("factorization", fact.bound), ("rewriting_complete", system.complete)),
            degrees,
        )
    if isinstance(obj, CategoryPresentation):
        reports = [
            check_confluence(obj, bound),
            check_cancellation(obj, bound),
            check_no_inverses(obj, bound),
        ]
        failed = [r for r in reports if not r.ok]
        if failed:
            raise UpstreamUnchecked("; ".join(f"{r.name} check failed" for r in failed), failed)
        system = build_rewriting_system(obj)
        degrees = obj.degree_map if obj.degree_map is not None and has_nondegenerate_degree(obj) else None
        return PathStructure(
            "category", obj.graph, system, obj,
            None if system.complete else bound,
            tuple((r.name, r.bound) for r in reports) + (("rewriting_complete", system.complete),),
            degrees,
        )
    raise TypeError(f"cannot certify {type(obj).__name__}")
