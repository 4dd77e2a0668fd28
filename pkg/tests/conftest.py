import re

import pytest

from fockpath.dsl import load
from fockpath.gallery import fixture_text
from fockpath.presentations import certify

_CRITERION = re.compile(r"test_criterion_(\d+[a-z]?)")
_results: dict[str, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.search(item.name)
    if not m or rep.outcome == "skipped":
        return
    if rep.when == "call" or rep.outcome == "failed":
        _results.setdefault(m.group(1), []).append(rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")

    def order(key):
        m = re.match(r"(\d+)([a-z]?)", key)
        return int(m.group(1)), m.group(2)

    for key in sorted(_results, key=order):
        status = "PASS" if all(_results[key]) else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {status}")


@pytest.fixture(scope="session")
def structure_of():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = certify(load(fixture_text(name)))
        return cache[name]

    return get
