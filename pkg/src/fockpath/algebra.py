"""Exact finite-dimensional operator algebra computations.

Everything here is dense linear algebra on matrices of size at most a few
dozen: spans are tracked through an orthonormal basis of vectorized matrices,
and rank decisions use a fixed singular-value tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionCap, NotExact
from .model import DirectedGraph, Path, every_path_lies_on_cycle, radiating_vertices, strongly_connected_components
from .presentations.category import CategoryPresentation, check_degree_functor, property_P_part1
from .presentations.kgraph import KGraphSkeleton
from .presentations.structure import PathStructure, certify, from_graph
from .reports import Verdict

RANK_TOL = 1e-9
DEFAULT_CAP = 64


def _dense(A) -> np.ndarray:
    return A.toarray().astype(complex) if sp.issparse(A) else np.asarray(A, dtype=complex)


def _vec(X: np.ndarray) -> np.ndarray:
    return X.reshape(-1, order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def rank(vectors: np.ndarray, tol: float = RANK_TOL) -> int:
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > tol))


def _null(M: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(M)
    r = int(np.sum(s > tol))
    return vh[r:].conj().T


class _SpanTracker:
    """Incremental first-seen pivoting: keeps the inputs that raise the rank."""

    def __init__(self, size: int):
        self.q = np.zeros((size, 0), dtype=complex)
        self.kept: list[np.ndarray] = []

    def add(self, X: np.ndarray) -> bool:
        v = _vec(X)
        norm = np.linalg.norm(v)
        if norm <= RANK_TOL:
            return False
        r = v - self.q @ (self.q.conj().T @ v)
        r = r - self.q @ (self.q.conj().T @ r)
        if np.linalg.norm(r) <= RANK_TOL * max(1.0, norm):
            return False
        self.q = np.hstack([self.q, (r / np.linalg.norm(r))[:, None]])
        self.kept.append(X)
        return True


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    dimension: int
    basis: tuple[np.ndarray, ...]
    contains_identity: bool
    generators: tuple[np.ndarray, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vectors(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((self.dimension**2, 0), dtype=complex)
        return np.column_stack([_vec(b) for b in self.basis])

    def contains(self, X, tol: float = RANK_TOL) -> bool:
        V = self.vectors()
        x = _vec(_dense(X))
        if V.shape[1] == 0:
            return np.linalg.norm(x) <= tol
        coef, *_ = np.linalg.lstsq(V, x, rcond=None)
        return np.linalg.norm(V @ coef - x) <= tol * max(1.0, np.linalg.norm(x))

    def same_span(self, other: FiniteAlgebra) -> bool:
        a, b = self.vectors(), other.vectors()
        ra, rb = rank(a), rank(b)
        return ra == rb == rank(np.hstack([a, b]))

    def contains_algebra(self, other: FiniteAlgebra) -> bool:
        a, b = self.vectors(), other.vectors()
        return rank(a) == rank(np.hstack([a, b]))


def span_closure(
    generators: Sequence, include_identity: bool = True, cap: int = DEFAULT_CAP
) -> FiniteAlgebra:
    """Smallest multiplicatively closed subspace containing ``generators`` (and ``I``)."""
    gens = [_dense(g) for g in generators]
    if not gens and not include_identity:
        raise ValueError("no generators and no identity: dimension unknown")
    d = gens[0].shape[0] if gens else None
    return _closure(gens, include_identity, cap, d)


def _closure(gens, include_identity, cap, d) -> FiniteAlgebra:
    if d is None:
        d = 1
    if any(g.shape != (d, d) for g in gens):
        raise ValueError("generators must share one square shape")
    if d > cap:
        raise DimensionCap(f"ambient dimension {d} exceeds cap {cap}")
    tracker = _SpanTracker(d * d)
    if include_identity:
        tracker.add(np.eye(d, dtype=complex))
    for g in gens:
        tracker.add(g)
    frontier = list(tracker.kept)
    while frontier:
        fresh = []
        current = list(tracker.kept)
        for x in frontier:
            for y in current:
                for prod in (x @ y, y @ x):
                    if tracker.add(prod):
                        fresh.append(prod)
        frontier = fresh
    basis = tuple(tracker.kept)
    ident = include_identity or _contains(basis, np.eye(d), d)
    return FiniteAlgebra(d, basis, ident, tuple(gens))


def _contains(basis, X, d) -> bool:
    return FiniteAlgebra(d, tuple(basis), False).contains(X)


def identity_algebra(d: int) -> FiniteAlgebra:
    return FiniteAlgebra(d, (np.eye(d, dtype=complex),), True)


def commutant(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> FiniteAlgebra:
    """``{X : XB = BX}`` for every basis element ``B``, by successive null spaces.

    Column-major vectorization gives ``vec(BX) = (I kron B) vec X`` and
    ``vec(XB) = (B^T kron I) vec X``.
    """
    d = alg.dimension
    if d > cap:
        raise DimensionCap(f"ambient dimension {d} exceeds cap {cap}")
    I = np.eye(d)
    K = np.eye(d * d, dtype=complex)
    for B in alg.basis:
        C = np.kron(B.T, I) - np.kron(I, B)
        ns = _null(C @ K, RANK_TOL)
        K = K @ ns
        if K.shape[1] == 0:
            break
    basis = tuple(_unvec(K[:, i], d) for i in range(K.shape[1]))
    return FiniteAlgebra(d, basis, True)


def bicommutant(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> FiniteAlgebra:
    return commutant(commutant(alg, cap), cap)


class Nilpotency(NamedTuple):
    index: int | None
    flag: str


def nilpotency_index(A, max_power: int, basis=None, tol: float = 1e-12) -> Nilpotency:
    """Least ``n <= max_power`` with ``||A^n||_F <= tol``, and whether it is exact.

    ``exact`` means the verdict survives removing the truncation: either the
    basis loses nothing at its top level, or ``A`` is a combination of left
    creation operators whose power vanishes already in the path algebra.
    Without a basis, ``A`` is taken as the finite operator it is.
    """
    M = _dense(A)
    index = None
    P = M.copy()
    for n in range(1, max_power + 1):
        if np.linalg.norm(P) <= tol:
            index = n
            break
        P = P @ M
    if basis is None:
        return Nilpotency(index, "exact")
    if basis.exact:
        return Nilpotency(index, "exact")
    from .fock import multiply_elements, path_element

    element = path_element(sp.csr_matrix(M), basis)
    if element is None or index is None:
        return Nilpotency(index, "truncation-limited")
    if not element:
        return Nilpotency(index, "exact")
    power = element
    for _ in range(index - 1):
        power = multiply_elements(basis.structure, power, element)
    limit = basis.structure.certified_length
    if not power and limit is None:
        return Nilpotency(index, "exact")
    return Nilpotency(index, "truncation-limited")


class Radical(NamedTuple):
    ideal: FiniteAlgebra
    semisimple: bool


def structure_constants(alg: FiniteAlgebra) -> np.ndarray:
    """``c[i, j, k]`` with ``b_i b_j = sum_k c[i, j, k] b_k``."""
    V = alg.vectors()
    n = alg.dim
    c = np.zeros((n, n, n), dtype=complex)
    for i, bi in enumerate(alg.basis):
        prods = np.column_stack([_vec(bi @ bj) for bj in alg.basis])
        coef, *_ = np.linalg.lstsq(V, prods, rcond=None)
        c[i] = coef.T
    return c


def jacobson_radical(alg: FiniteAlgebra) -> Radical:
    """Radical via the trace form of the regular representation.

    ``x`` lies in the radical exactly when ``tr(lambda(x y)) = 0`` for every
    ``y``, where ``lambda`` is left multiplication.  A non-unital algebra is
    unitized first by adjoining ``I``; its radical is unchanged.
    """
    d = alg.dimension
    work = alg
    if not alg.contains_identity and not alg.contains(np.eye(d)):
        work = FiniteAlgebra(d, alg.basis + (np.eye(d, dtype=complex),), True)
    n = work.dim
    if n == 0:
        return Radical(FiniteAlgebra(d, (), False), True)
    c = structure_constants(work)
    # lam[i][k, j] = c[i, j, k]: matrix of left multiplication by b_i
    lam = np.transpose(c, (0, 2, 1))
    T = np.einsum("ikj,ljk->il", lam, lam)
    scale = max(1.0, float(np.max(np.abs(T))))
    ns = _null(T / scale, RANK_TOL)
    elems = []
    for col in ns.T:
        X = sum(a * b for a, b in zip(col, work.basis))
        elems.append(X)
    tracker = _SpanTracker(d * d)
    for X in elems:
        tracker.add(X)
    ideal = FiniteAlgebra(d, tuple(tracker.kept), False)
    return Radical(ideal, ideal.dim == 0)


# ----------------------------------------------------------------------------
# structure-level predicates


def _structure(obj, bound: int = 6) -> PathStructure:
    if isinstance(obj, PathStructure):
        return obj
    return certify(obj, bound)


def left_regular_algebra(basis, cap: int = DEFAULT_CAP) -> FiniteAlgebra:
    from .fock import left_creation

    return span_closure([left_creation(basis, p) for p in basis.paths], True, cap)


def right_regular_algebra(basis, cap: int = DEFAULT_CAP) -> FiniteAlgebra:
    from .fock import right_creation

    return span_closure([right_creation(basis, p) for p in basis.paths], True, cap)


def finite_depth(structure: PathStructure) -> int:
    """Largest level of any class; raises :class:`NotExact` if the structure has a cycle."""
    if not structure.is_acyclic():
        raise NotExact("the generator graph has a cycle, so every Fock space is a truncation")
    return max(structure.level(p) for p in structure.classes(len(structure.graph.vertices) * max(1, _max_gen_level(structure))))


def _max_gen_level(structure: PathStructure) -> int:
    return max((structure.level(Path((e.id,), e.range, e.source)) for e in structure.graph.edges), default=0)


def exact_basis(structure: PathStructure):
    from .fock import build_basis

    return build_basis(structure, finite_depth(structure))


def verify_commutant_theorems(structure, N: int | None = None, cap: int = DEFAULT_CAP) -> dict:
    """Check ``L = R'``, ``R = L'`` and ``L'' = L`` on an exact (finite) Fock space."""
    from .fock import build_basis

    s = _structure(structure)
    depth = finite_depth(s)
    basis = build_basis(s, depth if N is None else max(N, depth))
    L = left_regular_algebra(basis, cap)
    R = right_regular_algebra(basis, cap)
    Lc, Rc = commutant(L, cap), commutant(R, cap)
    Lcc = commutant(Lc, cap)
    checks = {
        "L_equals_commutant_of_R": L.same_span(Rc),
        "R_equals_commutant_of_L": R.same_span(Lc),
        "L_equals_bicommutant": L.same_span(Lcc),
    }
    return {
        "ok": all(checks.values()),
        "checks": checks,
        "dims": {"fock": basis.dim, "L": L.dim, "R": R.dim, "L'": Lc.dim, "R'": Rc.dim, "L''": Lcc.dim},
        "tolerance": RANK_TOL,
    }


def _edge_cycle_verdict(g: DirectedGraph, clause: str) -> Verdict:
    chk = every_path_lies_on_cycle(g)
    if chk.holds:
        ev = [{"edgeless_vertices": list(chk.edgeless_vertices)}] if chk.edgeless_vertices else []
        return Verdict("semisimple", "semisimple", [], None, clause, ev)
    return Verdict("semisimple", "not-semisimple", [chk.witness.id], None, clause)


GRAPH_CLAUSE = "the left regular algebra is semisimple iff every path lies on a cycle"
KGRAPH_CLAUSE = "the left regular algebra is semisimple iff every edge lies on a cycle"
CATEGORY_CLAUSE = (
    "with a non-degenerate degree functor: (P) implies semisimple; "
    "semisimple implies every path lies on a cycle"
)


def stationary_generator_blocks(basis) -> dict[str, np.ndarray] | None:
    """Blocks of each ``L_e`` between consecutive levels once they stop changing."""
    from .fock import left_creation, stationary_block

    out = {}
    for e in basis.structure.graph.edges:
        blk = stationary_block(basis, left_creation(basis, e.id), 1)
        if blk.block is None:
            return None
        out[e.id] = blk.block
    return out


def semisimplicity_verdict(structure, bound: int = 6, truncation: int = 8, seed: int = 0) -> Verdict:
    """Structural semisimplicity verdict with its evidence chain.

    Graphs and k-graphs use the edge-on-cycle criterion.  For categories of
    paths the degree functor, (P)(i) and the (P)(ii) falsifier are evaluated;
    a definite "not-semisimple" comes only from a path with no return class,
    and "semisimple" needs every piece of evidence for (P) to be positive.
    """
    if isinstance(structure, DirectedGraph):
        return _edge_cycle_verdict(structure, GRAPH_CLAUSE)
    s = _structure(structure, bound)
    if s.kind == "graph":
        return _edge_cycle_verdict(s.graph, GRAPH_CLAUSE)
    if s.kind == "kgraph":
        return _edge_cycle_verdict(s.graph, KGRAPH_CLAUSE)

    from .fock import build_basis
    from .presentations.property_p import falsify_property_P_part2

    pres: CategoryPresentation = s.source
    evidence = []
    cyc = every_path_lies_on_cycle(s.graph)
    evidence.append({"step": "every path has a return class", "holds": cyc.holds})
    if not cyc.holds:
        return Verdict("semisimple", "not-semisimple", [cyc.witness.id], bound, CATEGORY_CLAUSE, evidence)
    if pres.degree_map is not None:
        deg_ok = check_degree_functor(pres).ok
        evidence.append({"step": "degree functor valid and non-degenerate", "holds": deg_ok})
    else:
        deg_ok = pres.length_preserving
        evidence.append({"step": "word length is a non-degenerate degree functor", "holds": deg_ok})
    p1 = property_P_part1(pres, bound)
    evidence.append({"step": "(P)(i) minimal paths finite", "holds": p1.ok, "counts": {v: c["count"] for v, c in p1.details["vertices"].items()}})
    p2 = falsify_property_P_part2(s, coeff_samples=20, path_bound=2, seed=seed, truncation=truncation)
    inconclusive = [x for x in p2.details["samples"] if x["outcome"] != "non-nilpotent witness"]
    evidence.append({
        "step": "(P)(ii) falsifier",
        "outcome": p2.details["outcome"],
        "samples_with_witness": len(p2.details["samples"]) - len(inconclusive),
        "samples": len(p2.details["samples"]),
    })
    basis = build_basis(s, min(truncation, s.certified_length or truncation))
    blocks = stationary_generator_blocks(basis)
    block_ok = False
    if blocks is not None:
        balg = span_closure(list(blocks.values()), include_identity=True)
        rad = jacobson_radical(balg)
        sizes = basis.level_sizes
        evidence.append({
            "step": "stationary block algebra semisimple",
            "holds": rad.semisimple,
            "block_algebra_dim": balg.dim,
            "level_sizes": sizes,
        })
        block_ok = rad.semisimple
    else:
        evidence.append({"step": "stationary block algebra semisimple", "holds": False, "reason": "levels do not stabilize"})
    if deg_ok and p1.ok and p2.ok and not inconclusive and block_ok:
        evidence.append({
            "caveat": "(P)(ii) is supported by sampling and the stationary regime, not proved for all combinations",
        })
        return Verdict("semisimple", "semisimple", [], bound, CATEGORY_CLAUSE, evidence)
    return Verdict("semisimple", "inconclusive", [], bound, CATEGORY_CLAUSE, evidence)


def _all_representatives(s: PathStructure, p: Path) -> set[Path]:
    """Every raw word in the class of ``p`` (length-preserving relations only)."""
    if s.rewriting is None:
        return {p}
    pres = s.source
    rels = [(u.edges, v.edges) for u, v in getattr(pres, "relations", getattr(pres, "squares", ()))]
    moves = rels + [(v, u) for u, v in rels]
    seen, stack = {p}, [p]
    while stack:
        w = stack.pop()
        for lhs, rhs in moves:
            n = len(lhs)
            for i in range(len(w.edges) - n + 1):
                if w.edges[i : i + n] == lhs:
                    q = Path(w.edges[:i] + rhs + w.edges[i + n :], w.range, w.source)
                    if q not in seen and len(q) <= len(p):
                        seen.add(q)
                        stack.append(q)
    return seen


def reflexivity_hypotheses(structure, len_bound: int = 4) -> dict:
    """Hypotheses of the radiating-vertex reflexivity criterion, and for k-graphs
    the three vertex conditions of the single-vertex reduction theorem.

    Only hypotheses are reported; reflexivity itself is never decided.
    """
    s = _structure(structure)
    g = s.graph
    rad = radiating_vertices(g)
    classes = s.classes(len_bound)
    per_vertex = {}
    verdict = "reflexive by Prop."
    for v in rad:
        loops = [e.id for e in g.edges if e.source == v and e.range == v]
        leaving = [p for p in classes if p.source == v]
        collision = None
        for i, m1 in enumerate(loops):
            for m2 in loops[i + 1 :]:
                p1, p2 = g.path(m1), g.path(m2)
                seen = {}
                for w in leaving:
                    if s.level(w) + 1 > len_bound:
                        continue
                    a = s.compose(w, p1)
                    seen.setdefault(a, (w.label, m1))
                for w in leaving:
                    if s.level(w) + 1 > len_bound:
                        continue
                    b = s.compose(w, p2)
                    if b in seen:
                        collision = {"w1": seen[b][0], "mu1": seen[b][1], "w2": w.label, "mu2": m2, "path": b.label}
                        break
                if collision:
                    break
            if collision:
                break
        a_status = "holds (no loops at v)" if not loops else "unverified"
        per_vertex[v] = {
            "loops": loops,
            "hypothesis_a": a_status,
            "hypothesis_b": collision is None,
            "witness": collision,
        }
        if collision is not None:
            verdict = "Prop. inapplicable"
        elif loops and verdict != "Prop. inapplicable":
            verdict = "inconclusive"
    out = {
        "radiating_vertices": list(rad),
        "vertices": per_vertex,
        "verdict": verdict,
        "bound_used": len_bound,
        "clause": "each radiating vertex v: (a) the loop category at v is reflexive, (b) w1 mu1 != w2 mu2 for distinct loops",
    }
    if s.kind == "kgraph":
        out["theorem"] = _kgraph_vertex_conditions(s, len_bound)
    return out


def _kgraph_vertex_conditions(s: PathStructure, len_bound: int) -> dict:
    g = s.graph
    classes = s.classes(len_bound)
    per_vertex = {}
    bad = []
    for v in g.vertices:
        into = [e for e in g.edges if e.range == v]
        c1 = all(e.source == v for e in into)
        loops = [e for e in g.edges if e.source == v and e.range == v]
        colors = [e.color for e in loops]
        c2 = len(colors) == len(set(colors))
        witness = None
        leave = []
        for p in classes:
            if p.source != v or p.is_vertex:
                continue
            if any(g.edge(r.edges[-1]).range != v for r in _all_representatives(s, p)):
                leave.append(p)
        for i, m1 in enumerate(loops):
            for m2 in loops[i + 1 :] + loops[:i]:
                if m1.id == m2.id:
                    continue
                for l1 in leave:
                    for l2 in leave:
                        if s.level(l1) + 1 > len_bound or s.level(l2) + 1 > len_bound:
                            continue
                        a = s.compose(l1, g.path(m1.id))
                        b = s.compose(l2, g.path(m2.id))
                        if a == b:
                            witness = {"lambda": l1.label, "mu": m1.id, "lambda'": l2.label, "mu'": m2.id}
                            break
                    if witness:
                        break
                if witness:
                    break
            if witness:
                break
        c3 = witness is not None
        per_vertex[v] = {"condition_1": c1, "condition_2": c2, "condition_3": c3, "witness": witness}
        if c1 and c2 and c3:
            bad.append(v)
    return {
        "vertices": per_vertex,
        "all_three_at": bad,
        "verdict": "reflexive by Theorem" if not bad else "inconclusive",
        "bound_used": len_bound,
    }
