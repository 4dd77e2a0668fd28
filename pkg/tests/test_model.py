import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpath import model
from fockpath.errors import DanglingEndpoint, DuplicateId, NotComposable
from fockpath.model import DirectedGraph, Edge, Path


def toeplitz():
    return DirectedGraph(("v1", "v2"), (Edge("e", "v1", "v1"), Edge("f", "v1", "v2")))


def line(n):
    vs = tuple(f"x{i}" for i in range(1, n + 1))
    return DirectedGraph(vs, tuple(Edge(f"e{i}", vs[i - 1], vs[i]) for i in range(1, n)))


def cycle4():
    vs = ("v1", "v2", "v3", "v4")
    return DirectedGraph(vs, tuple(Edge(f"e{i + 1}", vs[i], vs[(i + 1) % 4]) for i in range(4)))


def loops(n):
    return DirectedGraph(("x",), tuple(Edge(f"e{i}", "x", "x") for i in range(n)))


@st.composite
def graphs(draw, max_vertices=5, max_edges=8):
    n = draw(st.integers(1, max_vertices))
    vs = tuple(f"v{i}" for i in range(n))
    m = draw(st.integers(0, max_edges))
    ends = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=m, max_size=m))
    return DirectedGraph(vs, tuple(Edge(f"e{j}", vs[a], vs[b]) for j, (a, b) in enumerate(ends)))


# validation


def test_validate_toeplitz_shape():
    g = model.validate_graph({"vertices": ["v1", "v2"], "edges": [
        {"id": "e", "source": "v1", "range": "v1"}, {"id": "f", "source": "v1", "range": "v2"}]})
    assert g == toeplitz()


def test_validate_empty_graph():
    g = model.validate_graph({"vertices": [], "edges": []})
    assert g.vertices == () and g.edges == ()


def test_dangling_endpoint():
    with pytest.raises(DanglingEndpoint):
        model.validate_graph({"vertices": ["v1"], "edges": [{"id": "e", "source": "v1", "range": "v9"}]})


def test_duplicate_id():
    with pytest.raises(DuplicateId):
        model.validate_graph({"vertices": ["v", "v"], "edges": []})


# paths


def test_concatenate_toeplitz_edges():
    g = toeplitz()
    p = model.concatenate(g.path("f"), g.path("e"))
    assert p.edges == ("f", "e") and len(p) == 2
    assert (p.range, p.source) == ("v2", "v1")


def test_concatenate_vertex_is_identity():
    g = toeplitz()
    q = g.path("f e")
    assert model.concatenate(Path.vertex("v2"), q) == q
    assert model.concatenate(q, Path.vertex("v1")) == q


def test_concatenate_not_composable():
    g = toeplitz()
    with pytest.raises(NotComposable):
        model.concatenate(g.path("e"), g.path("f"))


def test_enumerate_single_loop():
    assert [len(x) for x in model.enumerate_paths(loops(1), 5)] == [1] * 6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumerate_free_words(n):
    assert [len(x) for x in model.enumerate_paths(loops(n), 3)] == [1, n, n * n, n**3]


def test_enumerate_toeplitz():
    labels = {p.label for lvl in model.enumerate_paths(toeplitz(), 2) for p in lvl}
    assert labels == {"v1", "v2", "e", "f", "e e", "f e"}


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(0, 4))
def test_enumeration_counts_match_adjacency_powers(g, L):
    # number of length-k paths = sum of entries of the k-th power of the edge-count matrix
    idx = {v: i for i, v in enumerate(g.vertices)}
    M = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for e in g.edges:
        M[idx[e.range], idx[e.source]] += 1
    counts = [len(x) for x in model.enumerate_paths(g, L)]
    expected = [int(np.linalg.matrix_power(M, k).sum()) for k in range(L + 1)]
    assert counts == expected


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_concatenation_is_associative(g):
    paths = [p for lvl in model.enumerate_paths(g, 2) for p in lvl]
    for p in paths[:6]:
        for q in paths[:6]:
            if p.source != q.range:
                continue
            for r in paths[:6]:
                if q.source != r.range:
                    continue
                lhs = model.concatenate(model.concatenate(p, q), r)
                rhs = model.concatenate(p, model.concatenate(q, r))
                assert lhs == rhs


# structure predicates


def test_row_finite_toeplitz():
    rf = model.is_row_finite(toeplitz())
    assert rf.row_finite and rf.in_degree == {"v1": 1, "v2": 1}


def test_isolated_vertex_is_source():
    g = DirectedGraph(("a", "b"), (Edge("e", "a", "a"),))
    assert model.is_row_finite(g).in_degree["b"] == 0
    assert model.sources(g) == ("b",)


def test_sources():
    assert model.sources(toeplitz()) == ()
    assert model.sources(line(4)) == ("x1",)
    assert set(model.sources(DirectedGraph(("a", "b"), ()))) == {"a", "b"}


def test_scc_examples():
    assert model.strongly_connected_components(cycle4()) == [("v1", "v2", "v3", "v4")]
    assert len(model.strongly_connected_components(line(5))) == 5
    assert model.strongly_connected_components(toeplitz()) == [("v1",), ("v2",)]


def _reach(g):
    # transitive closure by repeated relaxation
    r = {v: {v} for v in g.vertices}
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            for v in g.vertices:
                if e.source in r[v] and e.range not in r[v]:
                    r[v].add(e.range)
                    changed = True
    return r


@settings(max_examples=80, deadline=None)
@given(graphs(max_vertices=7, max_edges=10))
def test_scc_matches_mutual_reachability(g):
    r = _reach(g)
    ours = {frozenset(c) for c in model.strongly_connected_components(g)}
    oracle = {frozenset(w for w in g.vertices if w in r[v] and v in r[w]) for v in g.vertices}
    assert ours == oracle


def test_path_on_cycle_examples():
    assert model.every_path_lies_on_cycle(cycle4()).holds
    chk = model.every_path_lies_on_cycle(toeplitz())
    assert not chk.holds and chk.witness.id == "f"
    empty = model.every_path_lies_on_cycle(DirectedGraph(("a",), ()))
    assert empty.holds and empty.edgeless_vertices == ("a",)


def test_cycle_entry_examples():
    chk = model.every_cycle_has_entry(cycle4())
    assert not chk.holds and sorted(chk.witness.edges) == ["e1", "e2", "e3", "e4"]
    chk = model.every_cycle_has_entry(toeplitz())
    assert not chk.holds and chk.witness.edges == ("e",)
    assert model.every_cycle_has_entry(line(4)).holds


def test_cycle_entry_witness_is_a_closed_path():
    chk = model.every_cycle_has_entry(cycle4())
    g = cycle4()
    w = chk.witness
    assert g.path(w.edges).range == g.path(w.edges).source == w.range


def test_radiating_vertices():
    assert model.radiating_vertices(loops(2)) == ("x",)
    assert model.radiating_vertices(toeplitz()) == ("v1",)
    assert model.radiating_vertices(line(4)) == ("x1",)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_radiating_matches_path_definition(g):
    paths = [p for lvl in model.enumerate_paths(g, len(g.vertices)) for p in lvl]
    expected = tuple(v for v in g.vertices if all(p.source == v for p in paths if p.range == v))
    assert model.radiating_vertices(g) == expected
