import cmath

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpath import algebra, fock
from fockpath.dsl import load
from fockpath.errors import NotExact
from fockpath.gallery import fixture_text
from fockpath.model import DirectedGraph, Edge
from fockpath.presentations import certify


def S(name):
    return certify(load(fixture_text(name)))


def units(n):
    out = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1
            out.append(E)
    return out


def test_span_closure_powers_of_shift():
    b = fock.build_basis(DirectedGraph(("x",), (Edge("e", "x", "x"),)), 3)
    assert algebra.span_closure([fock.left_creation(b, "e")]).dim == 4


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_span_closure_single_shift(n):
    shift = np.eye(n, k=1)
    assert algebra.span_closure([shift]).dim == n


@pytest.mark.parametrize("n", [2, 3, 4])
def test_span_closure_separate_units(n):
    gens = []
    for j in range(n - 1):
        E = np.zeros((n, n))
        E[j, j + 1] = 1
        gens.append(E)
    assert algebra.span_closure(gens).dim == n * (n - 1) // 2 + 1


def test_empty_generators():
    assert algebra.span_closure([], include_identity=True).dim == 1


def test_commutant_schur_and_scalars():
    full = algebra.span_closure(units(3))
    assert algebra.commutant(full).dim == 1
    assert algebra.commutant(algebra.identity_algebra(3)).dim == 9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_commutant_elements_commute(seed, d):
    rng = np.random.default_rng(seed)
    gens = [np.diag(rng.integers(0, 2, size=d).astype(float)) for _ in range(2)]
    alg = algebra.span_closure(gens)
    comm = algebra.commutant(alg)
    for X in comm.basis:
        X = X.toarray() if sp.issparse(X) else X
        for Y in alg.basis:
            Y = Y.toarray() if sp.issparse(Y) else Y
            assert np.allclose(X @ Y, Y @ X, atol=1e-9)
    # the commutant of a commutative diagonal algebra contains the algebra
    assert comm.contains_algebra(alg)


def test_commutant_of_chain_left_is_right():
    b = fock.build_basis(S("chain2"), 1)
    L = algebra.left_regular_algebra(b)
    R = algebra.right_regular_algebra(b)
    assert algebra.commutant(L).same_span(R)


@pytest.mark.parametrize("name", ["hr1", "chain2", "cat_path", "mn_chain"])
def test_commutant_theorems(name):
    assert algebra.verify_commutant_theorems(S(name))["ok"]


def test_commutant_theorems_need_exactness():
    with pytest.raises(NotExact):
        algebra.verify_commutant_theorems(S("c4"))


def test_nilpotency():
    s = S("3loop2")
    b = fock.build_basis(s, 6)
    w = cmath.exp(2j * cmath.pi / 3)
    T = fock.left_creation(b, "a") + w * fock.left_creation(b, "b") + w * w * fock.left_creation(b, "c")
    assert algebra.nilpotency_index(T, 7, b) == (2, "exact")
    lb = fock.build_basis(DirectedGraph(("x",), (Edge("e", "x", "x"),)), 4)
    assert algebra.nilpotency_index(fock.left_creation(lb, "e"), 6, lb) == (5, "truncation-limited")
    assert algebra.nilpotency_index(sp.csr_matrix((3, 3)), 2).index == 1


def test_radical_examples():
    assert algebra.jacobson_radical(algebra.span_closure(units(2))).semisimple
    upper = algebra.span_closure([np.array([[1.0, 0], [0, 0]]), np.array([[0, 1.0], [0, 0]]), np.array([[0, 0], [0, 1.0]])])
    rad = algebra.jacobson_radical(upper)
    assert rad.ideal.dim == 1
    assert rad.ideal.contains(np.array([[0, 1.0], [0, 0]]))


def test_radical_of_chain_contains_edge():
    b = fock.build_basis(S("chain2"), 1)
    rad = algebra.jacobson_radical(algebra.left_regular_algebra(b))
    assert not rad.semisimple
    assert rad.ideal.contains(fock.left_creation(b, "e1"))


def test_cat_path_radical_dim():
    rad = algebra.jacobson_radical(algebra.left_regular_algebra(algebra.exact_basis(S("cat_path"))))
    assert rad.ideal.dim == 6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_radical_matches_edge_criterion_on_random_dags(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    vs = tuple(f"v{i}" for i in range(n))
    edges = []
    for j in range(int(rng.integers(0, 4))):
        a, c = sorted(rng.choice(n, size=2, replace=True).tolist())
        if a == c:
            continue
        edges.append(Edge(f"e{j}", vs[a], vs[c]))
    g = DirectedGraph(vs, tuple(edges))
    s = certify(g)
    b = algebra.exact_basis(s)
    if b.dim > algebra.DEFAULT_CAP:
        return
    rad = algebra.jacobson_radical(algebra.left_regular_algebra(b))
    assert rad.semisimple == (algebra.semisimplicity_verdict(g).verdict == "semisimple")


def test_verdicts():
    assert algebra.semisimplicity_verdict(S("c4")).verdict == "semisimple"
    v = algebra.semisimplicity_verdict(S("toeplitz"))
    assert v.verdict == "not-semisimple" and v.witnesses == ["f"]
    v = algebra.semisimplicity_verdict(S("3loop"))
    assert v.verdict == "semisimple"
    assert any("caveat" in step for step in v.evidence)


def test_reflexivity_reports():
    assert algebra.reflexivity_hypotheses(S("c4"))["verdict"] == "reflexive by Prop."
    assert algebra.reflexivity_hypotheses(S("3loop"))["verdict"] == "Prop. inapplicable"
    loops = algebra.reflexivity_hypotheses(S("loops"))
    assert loops["radiating_vertices"] == ["v"] or tuple(loops["radiating_vertices"]) == ("v",)
    assert "theorem" in loops
