import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpath import cli
from fockpath.dsl import StructureFile, build, parse, print_structure
from fockpath.errors import DSLSyntaxError, KindMismatch, UndeclaredId
from fockpath.gallery import fixture_text, list_fixtures
from fockpath.model import DirectedGraph
from fockpath.presentations import CategoryPresentation, KGraphSkeleton

from .test_model import graphs

TOEPLITZ = "graph { vertices v1 v2; edge e: v1 -> v1; edge f: v1 -> v2; }"


def test_parse_toeplitz():
    g = build(parse(TOEPLITZ))
    assert isinstance(g, DirectedGraph)
    assert [(e.id, e.source, e.range) for e in g.edges] == [("e", "v1", "v1"), ("f", "v1", "v2")]


def test_parse_3loop():
    text = (
        "category { vertices x; edge a: x -> x; edge b: x -> x; edge c: x -> x;"
        " relation: a b = b c; relation: b c = c a; }"
    )
    pres = build(parse(text))
    assert isinstance(pres, CategoryPresentation) and len(pres.relations) == 2


def test_undeclared_vertex():
    with pytest.raises(UndeclaredId) as exc:
        parse("graph { edge e: v1 -> v1; }")
    assert (exc.value.line, exc.value.column) == (1, 17)


@pytest.mark.parametrize(
    "text,error",
    [
        ("graph { vertices a; square: a = a; }", KindMismatch),
        ("kgraph 2 { vertices a; edge e: a -> a; }", DSLSyntaxError),
        ("graph { vertices a; edge e: a -> a }", DSLSyntaxError),
        ("graph { vertices a a; }", DSLSyntaxError),
        ("graph { vertices a; } trailing", DSLSyntaxError),
        ("graph { vertices a; edge e: 1: a -> a; }", KindMismatch),
        ("kgraph 2 { vertices a; edge e: 3: a -> a; }", DSLSyntaxError),
        ("graph { vertices a; @ }", DSLSyntaxError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse(text)


def test_multiline_positions():
    with pytest.raises(UndeclaredId) as exc:
        parse("graph {\n  vertices a;\n  edge e: a -> b;\n}")
    assert (exc.value.line, exc.value.column) == (3, 16)


@pytest.mark.parametrize("name", list_fixtures())
def test_gallery_texts_round_trip(name):
    ast = parse(fixture_text(name))
    assert parse(print_structure(ast)) == ast


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_printer_round_trip_random_graphs(g):
    from fockpath.dsl import EdgeDecl

    ast = StructureFile("graph", None, g.vertices, tuple(EdgeDecl(e.id, e.source, e.range) for e in g.edges))
    text = print_structure(ast)
    assert parse(text) == ast
    assert build(parse(text)) == g


def test_kgraph_build():
    assert isinstance(build(parse(fixture_text("hr1"))), KGraphSkeleton)


# CLI


def _run(*argv):
    report, code = cli.run(list(argv))
    return report, code


def test_analyze_c4():
    report, code = _run("analyze", "gallery:c4")
    assert code == 0
    assert report["verdicts"]["semisimple"] is True
    assert report["verdicts"]["every_cycle_has_entry"] is False


def test_verify_ck_toeplitz(tmp_path):
    path = tmp_path / "t.fp"
    path.write_text(TOEPLITZ)
    report, code = _run("verify-ck", str(path))
    assert code == 0 and report["checks"]["ckt"] is True


def test_enumerate_3loop():
    report, code = _run("enumerate", "gallery:3loop", "--max-length", "3")
    assert code == 0 and report["verdicts"]["counts"] == [1, 3, 3, 3]


def test_failed_property_exit_one():
    _, code = _run("check-axioms", "gallery:twin_squares_bad")
    assert code == 1


def test_parse_error_exit_two(tmp_path):
    path = tmp_path / "bad.fp"
    path.write_text("graph { edge e: v1 -> v1; }")
    report, code = _run("enumerate", str(path))
    assert code == 2 and report["line"] == 1


def test_usage_error_exit_two():
    assert _run("nonsense")[1] == 2
    assert _run("enumerate")[1] == 2
    assert _run("gallery", "no_such_fixture")[1] == 2


def test_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(TOEPLITZ))
    report, code = _run("enumerate", "-", "--max-length", "2")
    assert code == 0 and report["verdicts"]["counts"] == [2, 2, 2]


def test_report_schema():
    report, _ = _run("fock-build", "gallery:hr1", "--truncation", "2")
    for key in ("schema", "tool", "version", "input_digest", "command", "parameters", "findings", "verdicts"):
        assert key in report
    assert report["schema"] == "v1" and report["verdicts"]["dimension"] == 9
    assert report["parameters"]["seed"] == 0


def test_digest_depends_on_seed():
    a, _ = _run("enumerate", "gallery:hr1", "--seed", "1")
    b, _ = _run("enumerate", "gallery:hr1", "--seed", "2")
    assert a["input_digest"] != b["input_digest"]


def test_main_writes_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["gallery", "hr1", "--json", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert out.read_text() == printed
    assert json.loads(printed)["checks"]["hr1"] is True
