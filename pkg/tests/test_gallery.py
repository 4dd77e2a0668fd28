import pytest

from fockpath.errors import ExpectationMismatch
from fockpath.gallery import FIXTURES, evaluate, list_fixtures, run_fixture


@pytest.mark.parametrize("name", list_fixtures())
def test_fixture_matches_expectations(name):
    run_fixture(name)


@pytest.mark.parametrize("name", list_fixtures())
def test_expectations_are_tagged(name):
    for key, exp in FIXTURES[name].expected.items():
        assert exp.tag in {"stated", "derived", "trivial"}, key


def test_named_examples():
    assert evaluate("hr1")["basis_dim"]["actual"] == 9
    assert evaluate("3loop2")["T_nilpotency"]["actual"][0] == 2
    c4 = evaluate("c4")
    assert c4["semisimple"]["actual"] == "semisimple"
    assert c4["cycle_entry"]["actual"] is False


def test_mismatch_is_reported(monkeypatch):
    from fockpath import gallery

    fx = FIXTURES["hr1"]
    broken = dict(fx.expected)
    broken["basis_dim"] = gallery.Expect(10, "stated")
    monkeypatch.setitem(FIXTURES, "hr1", gallery.Fixture(fx.name, fx.text, broken, fx.params))
    with pytest.raises(ExpectationMismatch) as exc:
        run_fixture("hr1")
    assert any(d["property"] == "basis_dim" for d in exc.value.diff)
