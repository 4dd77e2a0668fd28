import cmath
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpath.dsl import load
from fockpath.errors import UpstreamUnchecked
from fockpath.gallery import fixture_text
from fockpath.model import DirectedGraph, Edge
from fockpath.presentations import (
    CategoryPresentation,
    KGraphSkeleton,
    build_rewriting_system,
    certify,
    check_cancellation,
    check_confluence,
    check_degree_functor,
    check_factorization,
    check_no_inverses,
    classes,
    complete,
    enumerate_kgraph_paths,
    falsify_property_P_part2,
    kgraph_normal_form,
    minimal_paths,
    normal_form,
    property_P_part1,
)

THREE_LOOP_RELATIONS = [("a b", "b c"), ("b c", "c a"), ("a c", "c b"), ("c b", "b a"), ("a a", "b b"), ("b b", "c c")]


def three_loops():
    return DirectedGraph(("x",), tuple(Edge(e, "x", "x") for e in "abc"))


@pytest.fixture(scope="module")
def threeloop():
    return CategoryPresentation.from_words(three_loops(), THREE_LOOP_RELATIONS, {e: 1 for e in "abc"})


@pytest.fixture(scope="module")
def catpath():
    return load(fixture_text("cat_path"))


# rewriting


def test_3loop_rules_are_six_and_complete(threeloop):
    sys_ = build_rewriting_system(threeloop)
    assert len(sys_.rules) == 6 and sys_.complete
    # every rule is length preserving and ordered by the traversal-order key
    for lhs, rhs in sys_.rules:
        assert len(lhs) == len(rhs) == 2
        assert sys_.key(rhs) < sys_.key(lhs)


def test_catpath_two_rules(catpath):
    assert len(build_rewriting_system(catpath).rules) == 2


def test_free_category_has_empty_system():
    pres = CategoryPresentation.from_words(three_loops(), [])
    assert build_rewriting_system(pres).rules == ()


def test_3loop_normal_form_degree_two(threeloop):
    assert normal_form(threeloop, "c b").label in {"a a", "b a", "c a"}
    assert normal_form(threeloop, "x").is_vertex


def test_3loop_length_three_words_have_three_classes(threeloop):
    nfs = {normal_form(threeloop, w) for w in itertools.product("abc", repeat=3)}
    assert {p.label for p in nfs} == {"a a a", "b a a", "c a a"}


def _bfs_class(word, relations):
    moves = [(tuple(u.split()), tuple(v.split())) for u, v in relations]
    moves += [(v, u) for u, v in moves]
    seen, stack = {word}, [word]
    while stack:
        w = stack.pop()
        for lhs, rhs in moves:
            for i in range(len(w) - len(lhs) + 1):
                if w[i : i + len(lhs)] == lhs:
                    q = w[:i] + rhs + w[i + len(lhs) :]
                    if q not in seen:
                        seen.add(q)
                        stack.append(q)
    return seen


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abc"), min_size=1, max_size=6))
def test_normal_form_is_a_class_invariant(threeloop, word):
    # oracle: BFS over all two-way rewrites of the raw relations
    word = tuple(word)
    nf = normal_form(threeloop, word)
    for other in _bfs_class(word, THREE_LOOP_RELATIONS):
        assert normal_form(threeloop, other) == nf
    assert normal_form(threeloop, nf.edges) == nf
    assert nf.edges in _bfs_class(word, THREE_LOOP_RELATIONS)


def test_completion_of_commutation():
    rank = {"a": 0, "b": 1}
    sys_ = complete([(("a", "b"), ("b", "a"))], rank)
    assert sys_.complete and len(sys_.rules) == 1
    assert not sys_.unresolved_critical_pairs()


# axioms


@pytest.mark.parametrize("bound", [4, 6])
def test_3loop_axioms(threeloop, bound):
    assert check_confluence(threeloop, bound).ok
    assert check_cancellation(threeloop, bound).ok
    assert check_no_inverses(threeloop, bound).ok


def test_catpath_confluent(catpath):
    assert check_confluence(catpath, 4).ok


def test_ab_equals_a_confluence_passes_but_cancellation_fails():
    pres = CategoryPresentation.from_words(three_loops(), [("a b", "a")])
    assert check_confluence(pres, 4).ok
    assert not check_cancellation(pres, 4).ok


def test_free_category_passes_everything():
    pres = CategoryPresentation.from_words(three_loops(), [])
    assert check_cancellation(pres, 4).ok and check_no_inverses(pres, 4).ok


def test_left_cancellation_witness():
    pres = CategoryPresentation.from_words(three_loops(), [("a b", "a c")])
    r = check_cancellation(pres, 3)
    assert {"kind": "left", "alpha": "a", "betas": ["b", "c"]} in r.violations


def test_inverse_witness():
    pres = CategoryPresentation.from_words(three_loops(), [("a b", "x")])
    assert {"alpha": "a", "beta": "b"} in check_no_inverses(pres, 3).violations


def test_degree_functor(threeloop, catpath):
    r = check_degree_functor(threeloop)
    assert r.ok and r.details["nondegenerate"]
    assert check_degree_functor(catpath).ok
    bad = CategoryPresentation.from_words(three_loops(), [], {"a": 0, "b": 1, "c": 1})
    r = check_degree_functor(bad)
    assert not r.ok and any(v["kind"] == "degenerate" for v in r.violations)


def test_minimal_paths(threeloop, catpath):
    assert {p.label for p in minimal_paths(threeloop, "x", 4).paths} == {"a", "b", "c"}
    free = CategoryPresentation.from_words(DirectedGraph(("x",), (Edge("e", "x", "x"),)), [])
    assert [p.label for p in minimal_paths(free, "x", 4).paths] == ["e"]
    assert {p.label for p in minimal_paths(catpath, "x3", 4).paths} == {"a2", "b2"}


def test_property_P_part1(threeloop):
    r = property_P_part1(threeloop, 4)
    assert r.ok and r.details["vertices"]["x"]["count"] == 3


# falsifier


def test_falsifier_finds_witness_for_T(threeloop):
    w = cmath.exp(2j * cmath.pi / 3)
    r = falsify_property_P_part2(threeloop, coeff_samples=0, combinations=[{"a": 1, "b": w, "c": w * w}])
    sample = r.details["samples"][0]
    assert sample["outcome"] == "non-nilpotent witness"
    assert sample["witness"]["mu"] in {"a", "b", "c"}


def test_falsifier_free_loop_not_nilpotent():
    g = DirectedGraph(("x",), (Edge("e", "x", "x"),))
    r = falsify_property_P_part2(g, coeff_samples=0, combinations=[{"e": 1}])
    assert r.details["samples"][0]["outcome"] == "non-nilpotent witness"


def test_falsifier_toeplitz_candidate_violation():
    g = load(fixture_text("toeplitz"))
    r = falsify_property_P_part2(g, coeff_samples=0, combinations=[{"f": 1}])
    assert r.details["outcome"] == "candidate violation" and not r.ok


def test_falsifier_is_seeded(threeloop):
    a = falsify_property_P_part2(threeloop, coeff_samples=5, seed=3).to_dict()
    b = falsify_property_P_part2(threeloop, coeff_samples=5, seed=3).to_dict()
    assert a == b


# k-graphs


def test_hr1_factorization_and_count():
    skel = load(fixture_text("hr1"))
    assert check_factorization(skel, (1, 1)).ok
    assert sum(len(v) for v in enumerate_kgraph_paths(skel, (1, 1)).values()) == 9
    assert kgraph_normal_form(skel, "b2 r1").label == "r2 b1"
    assert kgraph_normal_form(skel, "r2 b1").label == "r2 b1"


def test_twin_square_pairings():
    assert check_factorization(load(fixture_text("twin_squares")), (1, 1)).ok
    r = check_factorization(load(fixture_text("twin_squares_bad")), (1, 1))
    assert not r.ok
    assert any(v["kind"] == "AmbiguousFactorization" for v in r.violations)


def test_missing_square():
    g = DirectedGraph(("u", "v", "w"), (Edge("b", "u", "v", 1), Edge("r", "v", "w", 2)))
    r = check_factorization(KGraphSkeleton.from_words(2, g, []), (1, 1))
    assert any(v["kind"] == "MissingSquare" for v in r.violations)


def test_loops_normal_forms_and_counts():
    skel = load(fixture_text("loops"))
    nf = kgraph_normal_form(skel, "f f g f e")
    assert nf == kgraph_normal_form(skel, "e g f f f")
    assert skel.degree(nf) == (1, 3, 1)
    groups = enumerate_kgraph_paths(skel, 4)
    assert sum(len(v) for v in groups.values()) == 35
    assert all(len(v) == 1 for v in groups.values())


def test_bound_zero_gives_vertices():
    skel = load(fixture_text("hr1"))
    groups = enumerate_kgraph_paths(skel, 0)
    assert [p.label for p in groups[(0, 0)]] == ["u1", "u2", "u3", "u4"]


# certification


def test_raw_presentation_refused_when_axioms_fail():
    pres = CategoryPresentation.from_words(three_loops(), [("a b", "a c")])
    with pytest.raises(UpstreamUnchecked) as exc:
        certify(pres)
    assert exc.value.reports


def test_classes_3loop(threeloop):
    cls = classes(threeloop, 8)
    assert [sum(1 for p in cls if len(p) == k) for k in range(9)] == [1] + [3] * 8
