"""Finitely presented categories of paths and their bounded axiom checks.

Equality of morphisms is decided by a completed rewriting system.  Every
verdict is tied to the length bound it was computed at, and the checks that
need an independent oracle (confluence) compare the rewriting normal forms with
exhaustive exploration of all rewrite orders and with the equivalence classes
generated by the raw relations.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from ..model import DirectedGraph, Path, enumerate_paths
from ..reports import CheckReport
from .rewriting import RewriteSystem, Word, complete


@dataclass(frozen=True)
class CategoryPresentation:
    """Generators (the edges of ``graph``), relations, and an optional degree functor.

    ``degrees`` maps every generator to a vector in N^k; it extends additively
    to words.
    """

    graph: DirectedGraph
    relations: tuple[tuple[Path, Path], ...] = ()
    degrees: tuple[tuple[str, tuple[int, ...]], ...] | None = None
    _degree_map: dict | None = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", tuple(self.relations))
        for u, v in self.relations:
            if (u.range, u.source) != (v.range, v.source):
                raise ValueError(
                    f"relation {u.label} = {v.label} joins different endpoints "
                    f"({u.source}->{u.range} vs {v.source}->{v.range})"
                )
        if self.degrees is None:
            object.__setattr__(self, "_degree_map", None)
            return
        dmap = {e: tuple(int(x) for x in vec) for e, vec in dict(self.degrees).items()}
        object.__setattr__(self, "degrees", tuple(dmap.items()))
        missing = [e.id for e in self.graph.edges if e.id not in dmap]
        unknown = [e for e in dmap if not self.graph.has_edge(e)]
        if missing or unknown:
            raise ValueError(f"degree functor must cover exactly the generators (missing {missing}, unknown {unknown})")
        if len({len(v) for v in dmap.values()}) > 1:
            raise ValueError("degree vectors have different dimensions")
        if any(x < 0 for v in dmap.values() for x in v):
            raise ValueError("degree vectors must be non-negative")
        object.__setattr__(self, "_degree_map", dmap)

    @classmethod
    def from_words(
        cls,
        graph: DirectedGraph,
        relations: Iterable[tuple[str, str]] = (),
        degrees: Mapping[str, Iterable[int] | int] | None = None,
    ) -> CategoryPresentation:
        rels = tuple((graph.path(u), graph.path(v)) for u, v in relations)
        degs = None
        if degrees is not None:
            degs = tuple(
                (e, (d,) if isinstance(d, int) else tuple(d)) for e, d in degrees.items()
            )
        return cls(graph, rels, degs)

    @property
    def degree_map(self) -> dict[str, tuple[int, ...]] | None:
        return self._degree_map

    @property
    def rank(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.graph.edges)}

    def degree(self, word: Iterable[str]) -> tuple[int, ...] | None:
        if self._degree_map is None:
            return None
        k = len(next(iter(self._degree_map.values()), ()))
        total = [0] * k
        for e in word:
            for i, x in enumerate(self._degree_map[e]):
                total[i] += x
        return tuple(total)

    @property
    def length_preserving(self) -> bool:
        return all(len(u) == len(v) for u, v in self.relations)


@lru_cache(maxsize=128)
def build_rewriting_system(pres: CategoryPresentation, max_length: int | None = None) -> RewriteSystem:
    """Orient every relation by traversal shortlex and complete up to ``max_length``.

    Ties between letters are broken by generator declaration order.  Identical
    sides trigger an :class:`UnorientableRelation` warning and are dropped.
    """
    if max_length is None:
        longest = max((max(len(u), len(v)) for u, v in pres.relations), default=1)
        max_length = max(8, 2 * longest)
    return _complete_for(pres.relations, pres.rank, max_length)


def _complete_for(relations, rank, max_length) -> RewriteSystem:
    return complete(((u.edges, v.edges) for u, v in relations), rank, max_length=max_length)


def reduce_path(system: RewriteSystem, p: Path) -> Path:
    return Path(system.normal_form(p.edges), p.range, p.source)


def normal_form(pres: CategoryPresentation, word: Path | str | Iterable[str]) -> Path:
    p = word if isinstance(word, Path) else pres.graph.path(word)
    if isinstance(word, Path) and not p.is_vertex:
        pres.graph.path(p.edges)  # raises NotComposable for bad words
    return reduce_path(build_rewriting_system(pres), p)


def bounded_classes(system: RewriteSystem, graph: DirectedGraph, len_bound: int) -> list[Path]:
    """Normal forms of all raw words of length ``<= len_bound``, in length-lex order."""
    seen: set[Path] = set()
    frontier = [Path.vertex(v) for v in graph.vertices]
    seen.update(frontier)
    for _ in range(len_bound):
        nxt = []
        for mu in frontier:
            for e in graph.edges:
                if e.source == mu.range:
                    nu = reduce_path(system, Path((e.id,) + mu.edges, e.range, mu.source))
                    if nu not in seen:
                        seen.add(nu)
                        nxt.append(nu)
        frontier = nxt
    return sorted(seen, key=graph.sort_key)


def classes(pres: CategoryPresentation, len_bound: int) -> list[Path]:
    return bounded_classes(build_rewriting_system(pres), pres.graph, len_bound)


def _compose(system: RewriteSystem, p: Path, q: Path) -> Path | None:
    if p.source != q.range:
        return None
    return reduce_path(system, Path(p.edges + q.edges, p.range, q.source))


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def relation_classes(
    relations: Iterable[tuple[Word, Word]], words: Iterable[Path]
) -> _UnionFind:
    """Union-find of ``words`` under single relation applications in either direction.

    Only words inside the supplied set participate, which makes the classes
    exact for length-preserving relations and bounded otherwise.
    """
    words = list(words)
    present = set(words)
    uf = _UnionFind()
    moves = [(u, v) for u, v in relations] + [(v, u) for u, v in relations]
    for w in words:
        uf.find(w)
        for lhs, rhs in moves:
            if not lhs:
                continue
            n = len(lhs)
            for i in range(len(w.edges) - n + 1):
                if w.edges[i : i + n] == lhs:
                    other = Path(w.edges[:i] + rhs + w.edges[i + n :], w.range, w.source)
                    if other in present:
                        uf.union(w, other)
    return uf


def check_confluence(pres: CategoryPresentation, len_bound: int) -> CheckReport:
    """Confirm normal forms are well defined on all raw words up to ``len_bound``.

    Two independent oracles: (1) every raw word is explored under all rewrite
    orders and must reach a single irreducible word; (2) the classes generated
    by the original relations (both directions) must each carry one normal
    form, and for length-preserving presentations distinct classes must carry
    distinct normal forms.
    """
    system = build_rewriting_system(pres)
    words = [p for level in enumerate_paths(pres.graph, len_bound) for p in level]
    words.sort(key=lambda p: (system.key(p.edges), pres.graph.sort_key(p)))
    irreducible: dict[Path, frozenset[Path]] = {}
    violations = []
    for w in words:
        succ = [Path(s, w.range, w.source) for s in system.successors(w.edges)]
        if not succ:
            irreducible[w] = frozenset([w])
            continue
        out: set[Path] = set()
        for s in succ:
            out |= irreducible[s]
        irreducible[w] = frozenset(out)
        if len(out) > 1:
            violations.append(
                {
                    "kind": "divergent_rewriting",
                    "word": w.label,
                    "normal_forms": sorted(p.label for p in out),
                }
            )

    uf = relation_classes(((u.edges, v.edges) for u, v in pres.relations), words)
    nf_by_root: dict = defaultdict(set)
    for w in words:
        nf_by_root[uf.find(w)].add(reduce_path(system, w))
    for root, nfs in nf_by_root.items():
        if len(nfs) > 1:
            violations.append(
                {"kind": "class_split", "word": root.label, "normal_forms": sorted(p.label for p in nfs)}
            )
    if pres.length_preserving:
        owner: dict[Path, Path] = {}
        for root, nfs in nf_by_root.items():
            for nf in nfs:
                if nf in owner and owner[nf] != root:
                    violations.append(
                        {"kind": "class_merge", "word": nf.label, "classes": sorted([owner[nf].label, root.label])}
                    )
                owner[nf] = root
    return CheckReport(
        "confluence",
        not violations,
        len_bound,
        violations,
        {
            "rules": [[" ".join(l), " ".join(r)] for l, r in system.rules],
            "completed": system.complete,
            "words_checked": len(words),
        },
    )


def _class_pairs(system: RewriteSystem, cls: list[Path], len_bound: int):
    for a in cls:
        for b in cls:
            if a.source == b.range and len(a) + len(b) <= len_bound:
                yield a, b, _compose(system, a, b)


def check_cancellation(pres: CategoryPresentation, len_bound: int) -> CheckReport:
    """Left and right cancellation over all classes of combined length ``<= len_bound``."""
    system = build_rewriting_system(pres)
    cls = bounded_classes(system, pres.graph, len_bound)
    left: dict = defaultdict(set)
    right: dict = defaultdict(set)
    for a, b, ab in _class_pairs(system, cls, len_bound):
        left[(a, ab)].add(b)
        right[(b, ab)].add(a)
    violations = []
    for (a, _), betas in left.items():
        if len(betas) > 1:
            bs = sorted(betas, key=pres.graph.sort_key)
            violations.append({"kind": "left", "alpha": a.label, "betas": [b.label for b in bs]})
    for (b, _), alphas in right.items():
        if len(alphas) > 1:
            as_ = sorted(alphas, key=pres.graph.sort_key)
            violations.append({"kind": "right", "alpha": b.label, "betas": [a.label for a in as_]})
    violations.sort(key=lambda v: (v["kind"], v["alpha"], v["betas"]))
    return CheckReport("cancellation", not violations, len_bound, violations, {"classes": len(cls)})


def check_no_inverses(pres: CategoryPresentation, len_bound: int) -> CheckReport:
    """No composable ``alpha beta`` of non-vertex classes reduces to a vertex."""
    system = build_rewriting_system(pres)
    violations = []
    for e in pres.graph.edges:
        nf = system.normal_form((e.id,))
        if not nf:
            violations.append({"alpha": e.id, "beta": e.source})
    cls = bounded_classes(system, pres.graph, len_bound)
    for a, b, ab in _class_pairs(system, cls, len_bound):
        if not (a.is_vertex and b.is_vertex) and ab.is_vertex:
            violations.append({"alpha": a.label, "beta": b.label})
    return CheckReport("no_inverses", not violations, len_bound, violations, {"classes": len(cls)})


def check_degree_functor(pres: CategoryPresentation) -> CheckReport:
    if pres.degree_map is None:
        return CheckReport("degree_functor", False, None, [{"kind": "absent"}], {})
    violations = []
    for u, v in pres.relations:
        du, dv = pres.degree(u.edges), pres.degree(v.edges)
        if du != dv:
            violations.append({"kind": "not_additive", "relation": [u.label, v.label], "degrees": [list(du), list(dv)]})
    degenerate = [e for e, d in pres.degree_map.items() if not any(d)]
    for e in degenerate:
        violations.append({"kind": "degenerate", "generator": e})
    return CheckReport(
        "degree_functor",
        not violations,
        None,
        violations,
        {"additive": not any(v["kind"] == "not_additive" for v in violations), "nondegenerate": not degenerate},
    )


def has_nondegenerate_degree(pres: CategoryPresentation) -> bool:
    """True when an explicit degree functor is valid and non-degenerate, or when
    the relations preserve length (word length is then such a functor)."""
    if pres.degree_map is not None:
        return check_degree_functor(pres).ok
    return pres.length_preserving


class MinimalPaths(NamedTuple):
    paths: tuple[Path, ...]
    exact: bool


def minimal_paths(pres: CategoryPresentation, v: str, len_bound: int) -> MinimalPaths:
    """Non-vertex classes with range ``v`` that admit no factorization into two
    non-vertex classes, searched among classes of length ``<= len_bound``.

    ``exact`` is set when a non-degenerate degree functor exists and no
    inverses appear up to the bound: then any class of normal-form length two
    or more splits off a generator, and a length-one class cannot split into
    two pieces of positive degree, so the list is complete.
    """
    system = build_rewriting_system(pres)
    cls = bounded_classes(system, pres.graph, len_bound)
    decomposable = set()
    for a, b, ab in _class_pairs(system, cls, len_bound):
        if not a.is_vertex and not b.is_vertex:
            decomposable.add(ab)
    found = tuple(m for m in cls if m.range == v and not m.is_vertex and m not in decomposable)
    exact = (
        len_bound >= 2
        and has_nondegenerate_degree(pres)
        and check_no_inverses(pres, len_bound).ok
    )
    return MinimalPaths(found, exact)


def property_P_part1(pres: CategoryPresentation, len_bound: int) -> CheckReport:
    """Per-vertex counts of minimal paths; finite whenever the search is exact."""
    counts, exact_all = {}, True
    for v in pres.graph.vertices:
        mp = minimal_paths(pres, v, len_bound)
        counts[v] = {"count": len(mp.paths), "paths": [p.label for p in mp.paths], "exact": mp.exact}
        exact_all &= mp.exact
    return CheckReport(
        "property_P_i",
        exact_all,
        len_bound,
        [] if exact_all else [{"kind": "inexact_bound"}],
        {"vertices": counts},
    )
