"""Higher-rank graph skeletons: colored edges plus commuting squares.

The normal form of a morphism is its color-sorted representative: reading the
written word from right to left (the traversal order), colors never decrease.
It is reached by applying squares as rewrite rules.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable

from ..model import DirectedGraph, Path
from ..reports import CheckReport
from .category import CategoryPresentation, bounded_classes, reduce_path, relation_classes
from .rewriting import RewriteSystem, complete

MultiDegree = tuple[int, ...]


@dataclass(frozen=True)
class KGraphSkeleton:
    rank: int
    graph: DirectedGraph
    squares: tuple[tuple[Path, Path], ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be positive")
        bad = [e.id for e in self.graph.edges if e.color is None or not 1 <= e.color <= self.rank]
        if bad:
            raise ValueError(f"edges {bad} need a color in 1..{self.rank}")
        object.__setattr__(self, "squares", tuple(self.squares))

    @classmethod
    def from_words(cls, rank: int, graph: DirectedGraph, squares: Iterable[tuple[str, str]] = ()) -> KGraphSkeleton:
        return cls(rank, graph, tuple((graph.path(u), graph.path(v)) for u, v in squares))

    def color(self, edge_id: str) -> int:
        return self.graph.edge(edge_id).color

    def degree(self, word: Path | Iterable[str]) -> MultiDegree:
        edges = word.edges if isinstance(word, Path) else tuple(word)
        d = [0] * self.rank
        for e in edges:
            d[self.color(e) - 1] += 1
        return tuple(d)

    @property
    def letter_rank(self) -> dict[str, tuple[int, int]]:
        return {e.id: (e.color, i) for i, e in enumerate(self.graph.edges)}

    def to_presentation(self) -> CategoryPresentation:
        degrees = tuple(
            (e.id, tuple(int(c == e.color) for c in range(1, self.rank + 1))) for e in self.graph.edges
        )
        return CategoryPresentation(self.graph, self.squares, degrees)


@lru_cache(maxsize=128)
def kgraph_rewriting_system(skel: KGraphSkeleton) -> RewriteSystem:
    return complete(((u.edges, v.edges) for u, v in skel.squares), skel.letter_rank, max_length=8)


def kgraph_normal_form(skel: KGraphSkeleton, word: Path | str | Iterable[str]) -> Path:
    p = word if isinstance(word, Path) else skel.graph.path(word)
    if isinstance(word, Path) and not p.is_vertex:
        skel.graph.path(p.edges)
    return reduce_path(kgraph_rewriting_system(skel), p)


def _within(d: MultiDegree, bound: MultiDegree | int) -> bool:
    if isinstance(bound, int):
        return sum(d) <= bound
    return all(x <= b for x, b in zip(d, bound))


def _raw_words(skel: KGraphSkeleton, bound: MultiDegree | int) -> list[Path]:
    total = bound if isinstance(bound, int) else sum(bound)
    level = [Path.vertex(v) for v in skel.graph.vertices]
    words = list(level)
    for _ in range(total):
        nxt = []
        for e in skel.graph.edges:
            for mu in level:
                if mu.range == e.source:
                    p = Path((e.id,) + mu.edges, e.range, mu.source)
                    if _within(skel.degree(p), bound):
                        nxt.append(p)
        words.extend(nxt)
        level = nxt
    return words


def _square_violations(skel: KGraphSkeleton) -> list[dict]:
    out = []
    uses: dict[tuple[str, str], int] = defaultdict(int)
    for u, v in skel.squares:
        problems = []
        if len(u) != 2 or len(v) != 2:
            problems.append("sides must have length 2")
        else:
            if skel.color(u.edges[0]) == skel.color(u.edges[1]):
                problems.append(f"{u.label} is not bichromatic")
            if skel.degree(u) != skel.degree(v):
                problems.append("sides have different multidegrees")
            if u == v:
                problems.append("sides coincide")
        if problems:
            out.append({"kind": "InvalidSquare", "square": [u.label, v.label], "reason": "; ".join(problems)})
            continue
        uses[u.edges] += 1
        uses[v.edges] += 1
    for f in skel.graph.edges:
        for g in skel.graph.edges:
            if f.source != g.range or f.color == g.color:
                continue
            n = uses.get((f.id, g.id), 0)
            if n == 0:
                out.append({"kind": "MissingSquare", "word": f"{f.id} {g.id}"})
            elif n > 1:
                out.append({"kind": "DuplicateSquare", "word": f"{f.id} {g.id}", "count": n})
    return out


def check_factorization(skel: KGraphSkeleton, degree_bound: MultiDegree) -> CheckReport:
    """Unique factorization for every morphism of degree ``<= degree_bound``.

    Besides the square bookkeeping (each bichromatic composable pair lies in
    exactly one square), all raw words up to the bound are grouped into
    classes by the squares, and each class is required to split in exactly one
    way along every intermediate degree.  This covers coherence on words with
    three or more colors without a separate cube condition.
    """
    degree_bound = tuple(degree_bound)
    if len(degree_bound) != skel.rank:
        raise ValueError(f"degree bound must have {skel.rank} entries")
    violations = _square_violations(skel)
    words = _raw_words(skel, degree_bound)
    uf = relation_classes(((u.edges, v.edges) for u, v in skel.squares), words)
    members: dict = defaultdict(list)
    for w in words:
        members[uf.find(w)].append(w)
    graph = skel.graph
    for root in sorted(members, key=graph.sort_key):
        cls = members[root]
        d = skel.degree(cls[0])
        for m in product(*(range(x + 1) for x in d)):
            if not any(m) or m == d:
                continue
            found = set()
            for w in cls:
                acc = [0] * skel.rank
                for i, e in enumerate(w.edges):
                    if tuple(acc) == m:
                        break
                    acc[skel.color(e) - 1] += 1
                else:
                    i = len(w.edges)
                if tuple(acc) != m:
                    continue
                mu = Path(w.edges[:i], w.range, graph.edge(w.edges[i - 1]).source) if i else Path.vertex(w.range)
                nu = Path(w.edges[i:], mu.source, w.source) if i < len(w.edges) else Path.vertex(w.source)
                found.add((uf.find(mu), uf.find(nu)))
            rep = min(cls, key=graph.sort_key).label
            if not found:
                violations.append({"kind": "MissingFactorization", "word": rep, "split": list(m)})
            elif len(found) > 1:
                pairs = sorted(
                    [a.label, b.label] for a, b in (
                        (min(members[x], key=graph.sort_key), min(members[y], key=graph.sort_key))
                        for x, y in found
                    )
                )
                violations.append({"kind": "AmbiguousFactorization", "word": rep, "split": list(m), "factorizations": pairs})
    return CheckReport(
        "factorization",
        not violations,
        degree_bound,
        violations,
        {"classes": len(members), "words_checked": len(words)},
    )


def enumerate_kgraph_paths(skel: KGraphSkeleton, bound: MultiDegree | int) -> dict[MultiDegree, list[Path]]:
    """Normal forms grouped by multidegree; ``bound`` is a total degree or a vector."""
    total = bound if isinstance(bound, int) else sum(bound)
    system = kgraph_rewriting_system(skel)
    out: dict[MultiDegree, list[Path]] = defaultdict(list)
    for p in bounded_classes(system, skel.graph, total):
        d = skel.degree(p)
        if _within(d, bound):
            out[d].append(p)
    return dict(sorted(out.items(), key=lambda kv: (sum(kv[0]), tuple(-x for x in kv[0]))))
