"""Truncated Fock spaces and the operators acting on them.

A :class:`FockBasis` holds one orthonormal vector per morphism class of level
at most ``N``.  Operators are ``scipy.sparse`` CSR matrices with complex
entries.  Images that would land above level ``N`` are dropped, so relation
checks are evaluated on a mask of "safe" levels away from that boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import UnknownPath, UpstreamUnchecked
from .model import DirectedGraph, Path
from .presentations.category import CategoryPresentation
from .presentations.kgraph import KGraphSkeleton
from .presentations.structure import PathStructure, from_graph
from .reports import CheckReport

SparseOperator = sp.csr_matrix
DEFAULT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FockBasis:
    structure: PathStructure
    truncation: int
    paths: tuple[Path, ...]
    levels: np.ndarray = field(repr=False, compare=False)
    index: dict = field(repr=False, compare=False)

    @property
    def kind(self) -> str:
        return self.structure.kind

    @property
    def dim(self) -> int:
        return len(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def level_sizes(self) -> list[int]:
        return np.bincount(self.levels, minlength=self.truncation + 1).tolist()

    def level_indices(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.levels == i)

    def resolve(self, mu: Path | str | Iterable[str]) -> Path:
        """Normal form of ``mu``; raises :class:`UnknownPath` for undeclared ids."""
        if isinstance(mu, str) and mu.strip() == "":
            raise UnknownPath("empty word")
        try:
            return self.structure.path(mu)
        except UnknownPath:
            raise
        except KeyError as exc:
            raise UnknownPath(str(exc)) from None

    def vector(self, mu: Path | str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[self.resolve(mu)]] = 1.0
        return v

    @property
    def exact(self) -> bool:
        """True when no class lies above the truncation, so nothing is dropped."""
        top = self.level_indices(self.truncation)
        s = self.structure
        for i in top:
            mu = self.paths[i]
            for e in s.graph.edges:
                if e.source == mu.range and s.level(s.compose(s.graph.path(e.id), mu)) > self.truncation:
                    return False
        return True


def build_basis(structure: PathStructure | DirectedGraph, N: int) -> FockBasis:
    """Basis of all classes of level ``<= N``, ordered by level then lex.

    Plain graphs are accepted directly (they are free).  Skeletons and
    presentations must first go through :func:`certify`.
    """
    if isinstance(structure, DirectedGraph):
        structure = from_graph(structure)
    if isinstance(structure, (KGraphSkeleton, CategoryPresentation)):
        raise UpstreamUnchecked(
            f"{type(structure).__name__} has no verification certificate; pass it through certify() first"
        )
    if not isinstance(structure, PathStructure):
        raise TypeError(f"cannot build a Fock basis for {type(structure).__name__}")
    if N < 0:
        raise ValueError("truncation must be non-negative")
    if structure.certified_length is not None and N > structure.certified_length:
        raise UpstreamUnchecked(
            f"normal forms are certified only up to length {structure.certified_length}, truncation {N} requested"
        )
    paths = tuple(structure.classes(N))
    levels = np.array([structure.level(p) for p in paths], dtype=int)
    return FockBasis(structure, N, paths, levels, {p: i for i, p in enumerate(paths)})


def _from_pairs(dim: int, pairs: Sequence[tuple[int, int]], values=None) -> SparseOperator:
    if not pairs:
        return sp.csr_matrix((dim, dim), dtype=complex)
    rows, cols = zip(*pairs)
    data = np.ones(len(pairs), dtype=complex) if values is None else np.asarray(values, dtype=complex)
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, dim), dtype=complex)


def left_creation(basis: FockBasis, mu: Path | str) -> SparseOperator:
    """``L_mu xi_nu = xi_{mu nu}`` when composable and within the truncation."""
    m = basis.resolve(mu)
    s = basis.structure
    pairs = []
    for j, nu in enumerate(basis.paths):
        img = s.compose(m, nu)
        if img is not None and img in basis.index:
            pairs.append((basis.index[img], j))
    return _from_pairs(basis.dim, pairs)


def right_creation(basis: FockBasis, mu: Path | str) -> SparseOperator:
    """``R_mu xi_nu = xi_{nu mu}`` when ``r(mu) = s(nu)``, within the truncation."""
    m = basis.resolve(mu)
    s = basis.structure
    pairs = []
    for j, nu in enumerate(basis.paths):
        img = s.compose(nu, m)
        if img is not None and img in basis.index:
            pairs.append((basis.index[img], j))
    return _from_pairs(basis.dim, pairs)


def vertex_projection(basis: FockBasis, v: str) -> SparseOperator:
    return left_creation(basis, Path.vertex(v))


def level_projection(basis: FockBasis, i: int) -> SparseOperator:
    if not 0 <= i <= basis.truncation:
        raise ValueError(f"level {i} outside 0..{basis.truncation}")
    idx = basis.level_indices(i)
    return _from_pairs(basis.dim, list(zip(idx.tolist(), idx.tolist())))


def mask(basis: FockBasis, safe_level_bound: int) -> SparseOperator:
    """Projection onto levels ``<= safe_level_bound``."""
    keep = np.flatnonzero(basis.levels <= safe_level_bound).tolist()
    return _from_pairs(basis.dim, list(zip(keep, keep)))


def _maxabs(A) -> float:
    A = sp.csr_matrix(A)
    return float(np.max(np.abs(A.data))) if A.nnz else 0.0


def _generator_groups(basis: FockBasis) -> dict[int, list[str]]:
    groups: dict[int, list[str]] = {}
    for e in basis.structure.graph.edges:
        key = e.color if basis.kind == "kgraph" else 0
        groups.setdefault(key, []).append(e.id)
    return groups


def verify_ckt(basis: FockBasis, safe_level_bound: int | None = None, tol: float = DEFAULT_TOL) -> CheckReport:
    """Toeplitz-Cuntz-Krieger relations of the left regular family on safe levels.

    (a) ``L_e* L_e = P_{s(e)}``; (b) ``L_e* L_f = 0`` for distinct generators
    with a common range, so the ranges ``L_e L_e*`` are orthogonal; (c)
    ``sum_{r(e)=v} L_e L_e* <= P_v`` with the vacuum ``xi_v`` witnessing
    strictness.  For k-graphs the generators are grouped by color, since only
    edges of one degree have orthogonal ranges.  Also reports per vertex
    whether the sum equals ``P_v`` off level 0.
    """
    N = basis.truncation
    safe = N - 1 if safe_level_bound is None else safe_level_bound
    if safe > N - 1:
        raise ValueError(f"safe level bound must be <= {N - 1}")
    M = mask(basis, safe)
    g = basis.structure.graph
    L = {e.id: left_creation(basis, e.id) for e in g.edges}
    P = {v: vertex_projection(basis, v) for v in g.vertices}
    violations = []
    for e in g.edges:
        err = _maxabs(M @ (L[e.id].conj().T @ L[e.id] - P[e.source]) @ M)
        if err > tol:
            violations.append({"relation": "isometry", "edge": e.id, "error": err})
    groups = _generator_groups(basis)
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                if g.edge(a).range != g.edge(b).range:
                    continue
                err = _maxabs(L[a].conj().T @ L[b])
                if err > tol:
                    violations.append({"relation": "orthogonal_ranges", "edges": [a, b], "error": err})
    strict, ck_equal = {}, {}
    above_vacuum = mask(basis, safe) - mask(basis, 0)
    for color, members in groups.items():
        for v in g.vertices:
            into = [x for x in members if g.edge(x).range == v]
            S = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
            for x in into:
                S = S + L[x] @ L[x].conj().T
            D = (M @ (P[v] - S) @ M).toarray()
            lo = float(np.min(np.linalg.eigvalsh((D + D.conj().T) / 2))) if D.size else 0.0
            if lo < -tol:
                violations.append({"relation": "sum_below_projection", "vertex": v, "color": color, "min_eigenvalue": lo})
            xi = basis.vector(Path.vertex(v))
            gap = float(np.real(xi.conj() @ (D @ xi)))
            key = v if len(groups) == 1 else f"{v}/{color}"
            strict[key] = gap
            if gap <= tol:
                violations.append({"relation": "vacuum_strictness", "vertex": v, "color": color, "gap": gap})
            ck_equal[key] = bool(into) and _maxabs(above_vacuum @ (P[v] - S) @ above_vacuum) <= tol
    return CheckReport(
        "ckt",
        not violations,
        safe,
        violations,
        {"strictness_gap": strict, "ck_equality_off_vacuum": ck_equal, "tolerance": tol},
    )


def _classes_by_level(basis: FockBasis, top: int) -> list[Path]:
    return [p for p, l in zip(basis.paths, basis.levels) if l <= top]


def verify_kgraph_family(
    basis: FockBasis,
    safe_level_bound: int | None = None,
    n: Sequence[int] | None = None,
    word_level: int = 2,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """Cuntz-Krieger family relations (1)-(4) for the left regular representation.

    (1) vertex projections are mutually orthogonal projections; (2)
    ``L_{mu1} L_{mu2} = L_{mu1 mu2}``; (3) ``L_mu* L_mu = L_{s(mu)}``; (4)
    ``L_v - sum_{mu in v Lambda^n} L_mu L_mu*`` is computed on safe levels and
    compared with the predicted defect, the projection onto classes ``lambda``
    with ``r(lambda) = v`` and ``d(lambda) >= n`` failing.  Relations (2) and
    (3) are checked for classes of level ``<= word_level``.
    """
    s = basis.structure
    N = basis.truncation
    safe = N - 1 if safe_level_bound is None else safe_level_bound
    k = len(s.degree(Path.vertex(s.graph.vertices[0]))) if s.graph.vertices else 1
    n = tuple(n) if n is not None else tuple(int(i == 0) for i in range(k))
    g = s.graph
    violations = []
    P = {v: vertex_projection(basis, v) for v in g.vertices}
    for u in g.vertices:
        if _maxabs(P[u] @ P[u] - P[u]) > tol:
            violations.append({"relation": "(1)", "vertices": [u, u]})
        for v in g.vertices:
            if u != v and _maxabs(P[u] @ P[v]) > tol:
                violations.append({"relation": "(1)", "vertices": [u, v]})
    words = [p for p in _classes_by_level(basis, word_level) if not p.is_vertex]
    L = {p: left_creation(basis, p) for p in words}
    checked2 = 0
    for a in words:
        for b in words:
            if a.source != b.range:
                continue
            ab = s.compose(a, b)
            if s.level(ab) > N:
                continue
            checked2 += 1
            Mab = mask(basis, N - s.level(ab))
            err = _maxabs((L[a] @ L[b] - left_creation(basis, ab)) @ Mab)
            if err > tol:
                violations.append({"relation": "(2)", "words": [a.label, b.label], "error": err})
    for a in words:
        Ma = mask(basis, N - s.level(a))
        err = _maxabs(Ma @ (L[a].conj().T @ L[a] - P[a.source]) @ Ma)
        if err > tol:
            violations.append({"relation": "(3)", "word": a.label, "error": err})
    M = mask(basis, safe)
    defect = {}
    n_level = sum(n)
    for v in g.vertices:
        S = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for p in basis.paths:
            if p.range == v and s.degree(p) == n:
                Lp = left_creation(basis, p)
                S = S + Lp @ Lp.conj().T
        D = M @ (P[v] - S) @ M
        predicted = [
            i
            for i, p in enumerate(basis.paths)
            if p.range == v
            and basis.levels[i] <= safe
            and not all(x >= y for x, y in zip(s.degree(p), n))
        ]
        expected = _from_pairs(basis.dim, [(i, i) for i in predicted])
        if n_level > N:
            violations.append({"relation": "(4)", "vertex": v, "reason": "degree n lies above the truncation"})
        err = _maxabs(D - expected)
        if err > tol:
            violations.append({"relation": "(4)", "vertex": v, "error": err})
        defect[v] = {
            "rank": len(predicted),
            "contains_vacuum": basis.index[Path.vertex(v)] in predicted,
            "classes": [basis.paths[i].label for i in predicted],
        }
    return CheckReport(
        "kgraph_family",
        not violations,
        safe,
        violations,
        {"n": list(n), "defect": defect, "products_checked": checked2, "tolerance": tol},
    )


def _levels_of(basis: FockBasis, A) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    C = sp.coo_matrix(A)
    return C.row, C.col, C.data, basis.levels[C.col] - basis.levels[C.row]


def diagonal_part(basis: FockBasis, A, j: int) -> SparseOperator:
    """``Phi_j(A) = sum_l E_l A E_{l+j}``: entries from level ``l + j`` to level ``l``."""
    r, c, d, shift = _levels_of(basis, A)
    keep = shift == j
    return sp.csr_matrix((d[keep], (r[keep], c[keep])), shape=(basis.dim, basis.dim), dtype=complex)


def cesaro_sum(basis: FockBasis, A, k: int) -> SparseOperator:
    """``Sigma_k(A) = sum_{|j| < k} (1 - |j|/k) Phi_j(A)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    r, c, d, shift = _levels_of(basis, A)
    w = np.maximum(0.0, 1.0 - np.abs(shift) / k)
    out = sp.csr_matrix((d * w, (r, c)), shape=(basis.dim, basis.dim), dtype=complex)
    out.eliminate_zeros()
    return out


def cesaro_convergence_profile(basis: FockBasis, A, h: np.ndarray, k_max: int) -> list[float]:
    """``||Sigma_k(A) h - A h||`` for ``k = 1..k_max``."""
    Ah = A @ h
    return [float(np.linalg.norm(cesaro_sum(basis, A, k) @ h - Ah)) for k in range(1, k_max + 1)]


@dataclass(frozen=True)
class FourierCoefficients:
    """``a_w = <A xi_{s(w)}, xi_w>`` for every class ``w`` of the basis."""

    coefficients: Mapping[Path, complex]

    def nonzero(self, tol: float = DEFAULT_TOL) -> dict[Path, complex]:
        return {w: a for w, a in self.coefficients.items() if abs(a) > tol}

    def reconstruct(self, basis: FockBasis, tol: float = DEFAULT_TOL) -> SparseOperator:
        out = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for w, a in self.nonzero(tol).items():
            out = out + a * left_creation(basis, w)
        return out


def fourier_coefficients(A, basis: FockBasis) -> FourierCoefficients:
    A = sp.csr_matrix(A)
    coeffs = {}
    for w in basis.paths:
        coeffs[w] = complex(A[basis.index[w], basis.index[Path.vertex(w.source)]])
    return FourierCoefficients(coeffs)


def in_left_span(A, basis: FockBasis, tol: float = 1e-9) -> bool:
    """Whether ``A`` equals the operator rebuilt from its Fourier coefficients."""
    return _maxabs(sp.csr_matrix(A) - fourier_coefficients(A, basis).reconstruct(basis)) <= tol


PathElement = dict  # Path -> complex, a finite combination of L_w


def path_element(A, basis: FockBasis, tol: float = DEFAULT_TOL) -> PathElement | None:
    """Coefficients of ``A`` in the ``L_w`` basis, or ``None`` if ``A`` is not in their span."""
    if not in_left_span(A, basis):
        return None
    return fourier_coefficients(A, basis).nonzero(tol)


def multiply_elements(structure: PathStructure, x: PathElement, y: PathElement, tol: float = DEFAULT_TOL) -> PathElement:
    """Product in the path algebra; exact at every length the structure certifies."""
    out: dict[Path, complex] = {}
    for u, a in x.items():
        for v, b in y.items():
            w = structure.compose(u, v)
            if w is not None:
                out[w] = out.get(w, 0) + a * b
    return {w: c for w, c in out.items() if abs(c) > tol}


def element_operator(basis: FockBasis, x: PathElement) -> SparseOperator:
    out = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for w, a in x.items():
        out = out + a * left_creation(basis, w)
    return out


class StationaryBlock(NamedTuple):
    shift: int
    start_level: int
    block: np.ndarray | None


def stationary_block(basis: FockBasis, A, shift: int, min_repeats: int = 2, tol: float = DEFAULT_TOL) -> StationaryBlock:
    """Find the level ``l0`` from which the blocks ``E_{l+shift} A E_l`` are square and identical.

    Returns ``block=None`` when the observed levels do not settle into a
    repeated block at least ``min_repeats`` times.
    """
    A = sp.csr_matrix(A)
    N = basis.truncation
    blocks = []
    for l in range(0, N - shift + 1):
        rows, cols = basis.level_indices(l + shift), basis.level_indices(l)
        blocks.append(A[rows][:, cols].toarray() if len(rows) and len(cols) else np.zeros((len(rows), len(cols))))
    last = len(blocks) - 1
    if last < 0:
        return StationaryBlock(shift, -1, None)
    ref = blocks[last]
    if ref.shape[0] != ref.shape[1] or ref.size == 0:
        return StationaryBlock(shift, -1, None)
    start = last
    while start > 0 and blocks[start - 1].shape == ref.shape and np.max(np.abs(blocks[start - 1] - ref)) <= tol:
        start -= 1
    if last - start + 1 < min_repeats:
        return StationaryBlock(shift, -1, None)
    return StationaryBlock(shift, start, ref)


def trace_power_signature(M: np.ndarray) -> list[complex]:
    """``tr(M^j)`` for ``j = 1..dim``; all vanish exactly when ``M`` is nilpotent."""
    out, P = [], np.eye(M.shape[0], dtype=complex)
    for _ in range(M.shape[0]):
        P = P @ M
        out.append(complex(np.trace(P)))
    return out


def operator_to_json(A) -> dict:
    """Sparse triplets ``{dim, entries: [[row, col, re, im]]}`` sorted by ``(row, col)``."""
    C = sp.coo_matrix(A)
    entries = sorted(
        (int(r), int(c), float(np.real(v)), float(np.imag(v)))
        for r, c, v in zip(C.row, C.col, C.data)
        if v != 0
    )
    return {"dim": int(A.shape[0]), "entries": [list(t) for t in entries]}


def operator_from_json(data: Mapping | str) -> SparseOperator:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    entries = data["entries"]
    if not entries:
        return sp.csr_matrix((dim, dim), dtype=complex)
    rows = [int(e[0]) for e in entries]
    cols = [int(e[1]) for e in entries]
    vals = [complex(e[2], e[3]) for e in entries]
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
