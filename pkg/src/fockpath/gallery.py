"""Built-in example structures with tagged expected properties.

Each fixture is stored as DSL text.  Every expected value carries a tag:
``stated`` (a published value for the example), ``derived`` (worked out
independently of this package) or ``trivial`` (immediate from the definitions).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

import numpy as np

from . import algebra, fock, model
from .dsl import load
from .errors import ExpectationMismatch
from .model import DirectedGraph
from .presentations import (
    CategoryPresentation,
    KGraphSkeleton,
    certify,
    check_confluence,
    check_factorization,
    classes,
    enumerate_kgraph_paths,
    kgraph_normal_form,
    minimal_paths,
)

TAGS = ("stated", "derived", "trivial")


@dataclass(frozen=True)
class Expect:
    value: Any
    tag: str


@dataclass(frozen=True)
class Fixture:
    name: str
    text: str
    expected: dict[str, Expect]
    params: dict = field(default_factory=dict)


def _chain(n: int, reverse: bool = False) -> str:
    lines = ["graph {", "  vertices " + " ".join(f"x{i}" for i in range(1, n + 1)) + ";"]
    for j in range(1, n):
        s, r = (j, j + 1) if not reverse else (j + 1, j)
        lines.append(f"  edge e{j}: x{s} -> x{r};")
    return "\n".join(lines + ["}"]) + "\n"


def _omega2(size: int = 5) -> str:
    pts = [(i, j) for i in range(size + 1) for j in range(size + 1)]
    lines = ["kgraph 2 {", "  vertices " + " ".join(f"p{i}_{j}" for i, j in pts) + ";"]
    for i, j in pts:
        if i < size:
            lines.append(f"  edge b{i}_{j}: 1: p{i + 1}_{j} -> p{i}_{j};")
        if j < size:
            lines.append(f"  edge r{i}_{j}: 2: p{i}_{j + 1} -> p{i}_{j};")
    for i, j in pts:
        if i < size and j < size:
            lines.append(f"  square: b{i}_{j} r{i + 1}_{j} = r{i}_{j} b{i}_{j + 1};")
    return "\n".join(lines + ["}"]) + "\n"


THREE_LOOP = """\
category {
  vertices x;
  edge a: x -> x;
  edge b: x -> x;
  edge c: x -> x;
  relation: a b = b c;
  relation: b c = c a;
  relation: a c = c b;
  relation: c b = b a;
  relation: a a = b b;
  relation: b b = c c;
  degree a = 1;
  degree b = 1;
  degree c = 1;
}
"""

_A1, _B1, _C1 = [[1], [0], [0]], [[0], [1], [0]], [[0], [0], [1]]
_A = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
_B = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
_C = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


def _e(value, tag) -> Expect:
    return Expect(value, tag)


FIXTURES: dict[str, Fixture] = {}


def _add(name, text, params=None, **expected):
    FIXTURES[name] = Fixture(name, text, {k: _e(*v) for k, v in expected.items()}, params or {})


_add(
    "singleloop",
    "graph {\n  vertices x;\n  edge e: x -> x;\n}\n",
    {"L": 5, "N": 5},
    path_counts=([1, 1, 1, 1, 1, 1], "trivial"),
    basis_dim=(6, "trivial"),
    radiating=(["x"], "trivial"),
    semisimple=("semisimple", "derived"),
    cycle_entry=(False, "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "o2",
    "graph {\n  vertices x;\n  edge e1: x -> x;\n  edge e2: x -> x;\n}\n",
    {"L": 3, "N": 4},
    path_counts=([1, 2, 4, 8], "trivial"),
    semisimple=("semisimple", "derived"),
    cycle_entry=(True, "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "mn_chain",
    _chain(4),
    {"L": 3, "N": 3},
    path_counts=([4, 3, 2, 1], "trivial"),
    basis_dim=(10, "derived"),
    sources=(["x1"], "trivial"),
    radiating=(["x1"], "derived"),
    semisimple=("not-semisimple", "derived"),
    semisimple_witness=(["e1"], "derived"),
    cycle_entry=(True, "trivial"),
    commutant_theorems=(True, "derived"),
    left_algebra_dim=(10, "derived"),
    radical_dim=(6, "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "chain2",
    _chain(2),
    {"L": 2, "N": 1},
    basis_dim=(3, "trivial"),
    semisimple=("not-semisimple", "derived"),
    semisimple_witness=(["e1"], "derived"),
    commutant_theorems=(True, "derived"),
    radical_dim=(1, "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "compacts",
    _chain(6),
    {"L": 5, "N": 5},
    path_counts=([6, 5, 4, 3, 2, 1], "trivial"),
    basis_dim=(21, "derived"),
    sources=(["x1"], "trivial"),
    radiating=(["x1"], "derived"),
    path_on_cycle=(False, "derived"),
    cycle_entry=(True, "trivial"),
    ckt_ok=(True, "derived"),
)
_add(
    "compacts_reversed",
    _chain(6, reverse=True),
    {"L": 5, "N": 5},
    basis_dim=(21, "derived"),
    sources=(["x6"], "trivial"),
    radiating=(["x6"], "derived"),
    cycle_entry=(True, "trivial"),
    ckt_ok=(True, "derived"),
)
_add(
    "toeplitz",
    "graph {\n  vertices v1 v2;\n  edge e: v1 -> v1;\n  edge f: v1 -> v2;\n}\n",
    {"L": 2, "N": 6},
    path_counts=([2, 2, 2], "derived"),
    sources=([], "derived"),
    scc=([["v1"], ["v2"]], "derived"),
    path_on_cycle=(False, "stated"),
    path_on_cycle_witness=("f", "stated"),
    cycle_entry=(False, "derived"),
    cycle_entry_witness=("e", "derived"),
    radiating=(["v1"], "derived"),
    semisimple=("not-semisimple", "stated"),
    semisimple_witness=(["f"], "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "c4",
    "graph {\n  vertices v1 v2 v3 v4;\n  edge e1: v1 -> v2;\n  edge e2: v2 -> v3;\n"
    "  edge e3: v3 -> v4;\n  edge e4: v4 -> v1;\n}\n",
    {"L": 4, "N": 6},
    scc=([["v1", "v2", "v3", "v4"]], "trivial"),
    path_on_cycle=(True, "trivial"),
    semisimple=("semisimple", "derived"),
    cycle_entry=(False, "derived"),
    cycle_entry_witness=("e4 e3 e2 e1", "derived"),
    ckt_ok=(True, "derived"),
    ck_equality_off_vacuum=(True, "derived"),
)
_add(
    "hr1",
    "kgraph 2 {\n  vertices u1 u2 u3 u4;\n  edge b1: 1: u1 -> u2;\n  edge r2: 2: u2 -> u4;\n"
    "  edge b2: 1: u3 -> u4;\n  edge r1: 2: u1 -> u3;\n  square: b2 r1 = r2 b1;\n}\n",
    {"N": 2, "degree_bound": (1, 1)},
    basis_dim=(9, "stated"),
    factorization_ok=(True, "stated"),
    identified_products=(True, "stated"),
    commutant_theorems=(True, "derived"),
    semisimple=("not-semisimple", "derived"),
    ckt_ok=(True, "derived"),
)
_RAEBURN = (
    "kgraph 2 {{\n  vertices 1 2 3 4;\n  edge b1: 1: 2 -> 1;\n  edge r3: 2: 2 -> 4;\n  edge r4: 2: 2 -> 4;\n"
    "  edge b2: 1: 4 -> 3;\n  edge r1: 2: 1 -> 3;\n  edge r2: 2: 1 -> 3;\n"
    "  square: r1 b1 = b2 r3;\n  square: r2 b1 = b2 {second};\n}}\n"
)
_add(
    "twin_squares",
    _RAEBURN.format(second="r4"),
    {"N": 2, "degree_bound": (1, 1)},
    factorization_ok=(True, "stated"),
    basis_dim=(12, "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "twin_squares_bad",
    _RAEBURN.format(second="r3"),
    {"degree_bound": (1, 1)},
    factorization_ok=(False, "stated"),
    factorization_failures=(["AmbiguousFactorization", "DuplicateSquare", "MissingFactorization", "MissingSquare"], "derived"),
)
_add(
    "loops",
    "kgraph 3 {\n  vertices v;\n  edge e: 1: v -> v;\n  edge f: 2: v -> v;\n  edge g: 3: v -> v;\n"
    "  square: f e = e f;\n  square: g e = e g;\n  square: g f = f g;\n}\n",
    {"N": 4, "degree_bound": (1, 1, 1), "total": 4},
    factorization_ok=(True, "derived"),
    kgraph_path_total=(35, "trivial"),
    one_path_per_degree=(True, "trivial"),
    normal_forms_agree=(True, "stated"),
    semisimple=("semisimple", "derived"),
    ckt_ok=(True, "derived"),
    kgraph_family_ok=(True, "derived"),
    kgraph_defect_rank=(10, "derived"),
    kgraph_theorem_verdict=("reflexive by Theorem", "derived"),
)
_add(
    "omega2",
    _omega2(5),
    {"N": 10, "degree_bound": (1, 1), "total": 10},
    factorization_ok=(True, "derived"),
    kgraph_path_total=(441, "derived"),
    sources=(["p5_5"], "derived"),
    semisimple=("not-semisimple", "derived"),
)
_add(
    "c3_2",
    "kgraph 2 {\n  vertices v1 v2 v3;\n"
    "  edge b1: 1: v1 -> v2;\n  edge b2: 1: v2 -> v3;\n  edge b3: 1: v3 -> v1;\n"
    "  edge r1: 2: v1 -> v2;\n  edge r2: 2: v2 -> v3;\n  edge r3: 2: v3 -> v1;\n"
    "  square: r2 b1 = b2 r1;\n  square: r3 b2 = b3 r2;\n  square: r1 b3 = b1 r3;\n}\n",
    {"N": 3, "degree_bound": (1, 1)},
    factorization_ok=(True, "derived"),
    basis_dim=(30, "derived"),
    semisimple=("semisimple", "derived"),
    ckt_ok=(True, "derived"),
)
_add(
    "cat_path",
    "category {\n  vertices x1 x2 x3;\n  edge a1: x1 -> x2;\n  edge b1: x1 -> x2;\n"
    "  edge a2: x2 -> x3;\n  edge b2: x2 -> x3;\n"
    "  relation: b2 a1 = a2 b1;\n  relation: a2 a1 = b2 b1;\n"
    "  degree a1 = 1;\n  degree b1 = 1;\n  degree a2 = 1;\n  degree b2 = 1;\n}\n",
    {"L": 4, "N": 2},
    non_vertex_paths=(6, "stated"),
    confluent=(True, "derived"),
    minimal_paths_at=({"x3": ["a2", "b2"]}, "derived"),
    semisimple=("not-semisimple", "derived"),
    radical_dim=(6, "derived"),
)
_add(
    "3loop",
    THREE_LOOP,
    {"L": 8, "N": 4},
    class_counts=([1, 3, 3, 3, 3, 3, 3, 3, 3], "stated"),
    basis_dim=(13, "stated"),
    level_blocks=(True, "stated"),
    confluent=(True, "derived"),
    minimal_paths_at=({"x": ["a", "b", "c"]}, "derived"),
    semisimple=("semisimple", "stated"),
    reflexivity=("Prop. inapplicable", "derived"),
)
_add(
    "3loop2",
    THREE_LOOP,
    {"N": 6},
    T_nilpotency=([2, "exact"], "derived"),
)


def list_fixtures() -> list[str]:
    return list(FIXTURES)


def fixture_text(name: str) -> str:
    return FIXTURES[name].text


class _Context:
    def __init__(self, fx: Fixture):
        self.fx = fx
        self.obj = load(fx.text)

    @cached_property
    def structure(self):
        return certify(self.obj)

    @cached_property
    def graph(self) -> DirectedGraph:
        return self.obj if isinstance(self.obj, DirectedGraph) else self.obj.graph

    def basis(self, N=None):
        return fock.build_basis(self.structure, self.fx.params.get("N", 6) if N is None else N)

    @cached_property
    def default_basis(self):
        return self.basis()

    @cached_property
    def verdict(self):
        return algebra.semisimplicity_verdict(self.structure)

    @cached_property
    def factorization(self):
        return check_factorization(self.obj, self.fx.params["degree_bound"])


def _path_counts(c: _Context):
    return [len(level) for level in model.enumerate_paths(c.graph, c.fx.params["L"])]


def _class_counts(c: _Context):
    L = c.fx.params["L"]
    cls = classes(c.obj, L)
    return [sum(1 for p in cls if len(p) == k) for k in range(L + 1)]


def _ckt(c: _Context):
    return fock.verify_ckt(c.default_basis)


def _level_blocks(c: _Context):
    b = c.default_basis
    ok = True
    for x, first, block in (("a", _A1, _A), ("b", _B1, _B), ("c", _C1, _C)):
        L = fock.left_creation(b, x)
        if not np.array_equal(L[b.level_indices(1)][:, b.level_indices(0)].toarray(), np.array(first, dtype=complex)):
            ok = False
        for l in range(1, b.truncation):
            blk = L[b.level_indices(l + 1)][:, b.level_indices(l)].toarray()
            if not np.array_equal(blk, np.array(block, dtype=complex)):
                ok = False
    return ok


def _t_nilpotency(c: _Context):
    b = c.default_basis
    w = cmath.exp(2j * cmath.pi / 3)
    T = fock.left_creation(b, "a") + w * fock.left_creation(b, "b") + w * w * fock.left_creation(b, "c")
    r = algebra.nilpotency_index(T, b.truncation + 1, b)
    return [r.index, r.flag]


def _identified_products(c: _Context):
    b = c.default_basis
    lhs = fock.left_creation(b, "b2") @ fock.left_creation(b, "r1")
    rhs = fock.left_creation(b, "r2") @ fock.left_creation(b, "b1")
    return (lhs != rhs).nnz == 0


def _one_path_per_degree(c: _Context):
    groups = enumerate_kgraph_paths(c.obj, c.fx.params["total"])
    return all(len(v) == 1 for v in groups.values())


def _kgraph_total(c: _Context):
    return sum(len(v) for v in enumerate_kgraph_paths(c.obj, c.fx.params["total"]).values())


def _loops_normal_forms(c: _Context):
    return kgraph_normal_form(c.obj, "f f g f e") == kgraph_normal_form(c.obj, "e g f f f")


def _exact_left_algebra(c: _Context):
    return algebra.left_regular_algebra(algebra.exact_basis(c.structure))


def _minimal_paths_at(c: _Context):
    L = c.fx.params.get("L", 4)
    return {
        v: [p.label for p in minimal_paths(c.obj, v, L).paths]
        for v in c.graph.vertices
        if v in c.fx.expected["minimal_paths_at"].value
    }


PROPERTIES: dict[str, Callable[[_Context], Any]] = {
    "path_counts": _path_counts,
    "class_counts": _class_counts,
    "basis_dim": lambda c: c.default_basis.dim,
    "sources": lambda c: list(model.sources(c.graph)),
    "scc": lambda c: [list(x) for x in model.strongly_connected_components(c.graph)],
    "radiating": lambda c: list(model.radiating_vertices(c.graph)),
    "path_on_cycle": lambda c: model.every_path_lies_on_cycle(c.graph).holds,
    "path_on_cycle_witness": lambda c: model.every_path_lies_on_cycle(c.graph).witness.id,
    "cycle_entry": lambda c: model.every_cycle_has_entry(c.graph).holds,
    "cycle_entry_witness": lambda c: model.every_cycle_has_entry(c.graph).witness.label,
    "semisimple": lambda c: c.verdict.verdict,
    "semisimple_witness": lambda c: list(c.verdict.witnesses),
    "ckt_ok": lambda c: _ckt(c).ok,
    "ck_equality_off_vacuum": lambda c: all(_ckt(c).details["ck_equality_off_vacuum"].values()),
    "commutant_theorems": lambda c: algebra.verify_commutant_theorems(c.structure)["ok"],
    "left_algebra_dim": lambda c: _exact_left_algebra(c).dim,
    "radical_dim": lambda c: algebra.jacobson_radical(_exact_left_algebra(c)).ideal.dim,
    "factorization_ok": lambda c: c.factorization.ok,
    "factorization_failures": lambda c: sorted({v["kind"] for v in c.factorization.violations}),
    "identified_products": _identified_products,
    "kgraph_path_total": _kgraph_total,
    "one_path_per_degree": _one_path_per_degree,
    "normal_forms_agree": _loops_normal_forms,
    "kgraph_family_ok": lambda c: fock.verify_kgraph_family(c.default_basis).ok,
    "kgraph_defect_rank": lambda c: fock.verify_kgraph_family(c.default_basis).details["defect"]["v"]["rank"],
    "kgraph_theorem_verdict": lambda c: algebra.reflexivity_hypotheses(c.structure)["theorem"]["verdict"],
    "non_vertex_paths": lambda c: sum(1 for p in c.structure.classes(10) if not p.is_vertex),
    "confluent": lambda c: check_confluence(c.obj, 6).ok,
    "minimal_paths_at": _minimal_paths_at,
    "level_blocks": _level_blocks,
    "reflexivity": lambda c: algebra.reflexivity_hypotheses(c.structure)["verdict"],
    "T_nilpotency": _t_nilpotency,
}


def evaluate(name: str) -> dict:
    """Compute every expected property of fixture ``name`` without raising."""
    fx = FIXTURES[name]
    ctx = _Context(fx)
    out = {}
    for prop, exp in fx.expected.items():
        actual = PROPERTIES[prop](ctx)
        out[prop] = {"expected": exp.value, "actual": actual, "tag": exp.tag, "match": actual == exp.value}
    return out


def run_fixture(name: str) -> dict:
    """Evaluate fixture ``name``; raises :class:`ExpectationMismatch` with a field-level diff."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    results = evaluate(name)
    diff = [
        {"property": k, "expected": r["expected"], "actual": r["actual"], "tag": r["tag"]}
        for k, r in results.items()
        if not r["match"]
    ]
    if diff:
        raise ExpectationMismatch(name, diff)
    return {
        "fixture": name,
        "kind": FIXTURES[name].text.split(None, 1)[0],
        "properties": {k: {"value": r["actual"], "tag": r["tag"]} for k, r in results.items()},
    }
