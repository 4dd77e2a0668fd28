"""Command-line interface.

``fockpath COMMAND FILE [flags]`` where FILE is a structure file in the DSL
(see :mod:`fockpath.dsl`), ``-`` for stdin, or ``gallery:NAME`` for a built-in
fixture.  Every command emits a deterministic JSON report (schema ``v1``).

Exit codes: 0 when every check passes, 1 when a checked property fails, 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import Any

import numpy as np

from . import __version__, algebra, fock, gallery, model
from .dsl import build, parse
from .errors import ExpectationMismatch, FockPathError, ParseError
from .model import DirectedGraph
from .presentations import (
    CategoryPresentation,
    KGraphSkeleton,
    certify,
    check_cancellation,
    check_confluence,
    check_degree_functor,
    check_factorization,
    check_no_inverses,
    classes,
    enumerate_kgraph_paths,
    property_P_part1,
)

SCHEMA = "v1"
COMMANDS = ("check-axioms", "enumerate", "fock-build", "verify-ck", "cesaro", "fourier", "analyze", "gallery")


class Report:
    def __init__(self, command: str, text: str, params: dict):
        self.command = command
        self.text = text
        self.params = params
        self.findings: list[dict] = []
        self.checks: dict[str, bool] = {}
        self.verdicts: dict[str, Any] = {}

    def check(self, name: str, ok: bool, finding: Any = None) -> None:
        self.checks[name] = bool(ok)
        if finding is not None:
            self.findings.append({"name": name, "result": finding})

    def note(self, name: str, finding: Any) -> None:
        self.findings.append({"name": name, "result": finding})

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        digest = hashlib.sha256(
            (self.text + "\0" + json.dumps(self.params, sort_keys=True)).encode("utf-8")
        ).hexdigest()
        return _clean({
            "schema": SCHEMA,
            "tool": "fockpath",
            "version": __version__,
            "command": self.command,
            "input_digest": digest,
            "parameters": self.params,
            "checks": self.checks,
            "verdicts": self.verdicts,
            "findings": self.findings,
            "ok": self.ok,
        })


def _clean(x):
    """Make ``x`` JSON-ready and stable: round floats, stringify odd keys."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return float(f"{v:.12g}") + 0.0
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    if hasattr(x, "to_dict"):
        return _clean(x.to_dict())
    if hasattr(x, "label"):
        return x.label
    return x


def _graph_of(obj) -> DirectedGraph:
    return obj if isinstance(obj, DirectedGraph) else obj.graph


def _kgraph_bound(skel: KGraphSkeleton, L: int) -> tuple[int, ...]:
    return (max(1, L // skel.rank),) * skel.rank


def cmd_check_axioms(obj, rep: Report, a) -> None:
    g = _graph_of(obj)
    rf = model.is_row_finite(g)
    rep.check("graph_valid", True, {"vertices": len(g.vertices), "edges": len(g.edges)})
    rep.note("in_degree", rf.in_degree)
    if isinstance(obj, KGraphSkeleton):
        r = check_factorization(obj, _kgraph_bound(obj, a.max_length))
        rep.check("factorization", r.ok, r)
    elif isinstance(obj, CategoryPresentation):
        L = a.max_length
        for r in (check_confluence(obj, L), check_cancellation(obj, L), check_no_inverses(obj, L)):
            rep.check(r.name, r.ok, r)
        if obj.degree_map is not None:
            r = check_degree_functor(obj)
            rep.check(r.name, r.ok, r)
        p1 = property_P_part1(obj, L)
        rep.note(p1.name, p1)


def cmd_enumerate(obj, rep: Report, a) -> None:
    L = a.max_length
    if isinstance(obj, DirectedGraph):
        levels = model.enumerate_paths(obj, L)
        rep.verdicts["counts"] = [len(x) for x in levels]
        rep.note("paths", [[p.label for p in lvl] for lvl in levels])
    elif isinstance(obj, KGraphSkeleton):
        groups = enumerate_kgraph_paths(obj, L)
        rep.verdicts["counts"] = [sum(len(v) for d, v in groups.items() if sum(d) == k) for k in range(L + 1)]
        rep.note("by_degree", [{"degree": list(d), "paths": [p.label for p in v]} for d, v in groups.items()])
    else:
        cls = classes(obj, L)
        rep.verdicts["counts"] = [sum(1 for p in cls if len(p) == k) for k in range(L + 1)]
        rep.note("classes", [p.label for p in cls])
    rep.check("enumerated", True)


def _basis(obj, a):
    return fock.build_basis(certify(obj, a.max_length), a.truncation)


def cmd_fock_build(obj, rep: Report, a) -> None:
    b = _basis(obj, a)
    rep.verdicts["dimension"] = b.dim
    rep.verdicts["level_sizes"] = b.level_sizes
    rep.note("basis", [p.label for p in b.paths])
    rep.note(
        "left_creation",
        {e.id: fock.operator_to_json(fock.left_creation(b, e.id)) for e in b.structure.graph.edges},
    )
    rep.check("built", True)


def cmd_verify_ck(obj, rep: Report, a) -> None:
    b = _basis(obj, a)
    r = fock.verify_ckt(b, tol=a.tolerance)
    if b.kind == "category":
        # ranges of distinct generators may overlap here; only isometry is required
        iso = [x for x in r.violations if x["relation"] == "isometry"]
        rep.check("isometry", not iso, {"violations": iso})
        rep.note("ckt_relations", r)
    else:
        rep.check("ckt", r.ok, r)
    if b.kind == "kgraph":
        r = fock.verify_kgraph_family(b, tol=a.tolerance)
        rep.check("kgraph_family", r.ok, r)


def _random_operator(b, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(b.dim, b.dim)) + 1j * rng.normal(size=(b.dim, b.dim))


def cmd_cesaro(obj, rep: Report, a) -> None:
    import scipy.sparse as sp

    b = _basis(obj, a)
    N = b.truncation
    rng = np.random.default_rng(a.seed)
    A = sp.csr_matrix(_random_operator(b, rng))
    h = rng.normal(size=b.dim) + 1j * rng.normal(size=b.dim)
    total = sum(
        np.linalg.norm(fock.diagonal_part(b, A, j).toarray()) for j in range(-N, N + 1)
    )
    worst = 0.0
    for k in range(1, 10 * N + 1):
        err = np.linalg.norm((fock.cesaro_sum(b, A, k) - A).toarray())
        worst = max(worst, err - (N / k) * total)
    rep.check("weight_deficit_bound", worst <= a.tolerance, {"max_excess": worst})
    profile = fock.cesaro_convergence_profile(b, A, h, 10 * N)
    rep.note("convergence_profile", {"k_max": 10 * N, "endpoint": profile[-1], "first": profile[:5]})
    rep.verdicts["profile_endpoint"] = profile[-1]


def cmd_fourier(obj, rep: Report, a) -> None:
    b = _basis(obj, a)
    rng = np.random.default_rng(a.seed)
    words = [p for p, l in zip(b.paths, b.levels) if 1 <= l <= 2]
    coeffs = {p: complex(rng.normal(), rng.normal()) for p in words}
    A = fock.element_operator(b, coeffs)
    fc = fock.fourier_coefficients(A, b)
    recon = fc.reconstruct(b)
    err = float(abs(recon - A).max()) if (recon - A).nnz else 0.0
    rep.check("reconstruction", err <= 1e-9, {"max_error": err})
    rep.note("coefficients", [[w.label, c] for w, c in fc.nonzero().items()])


def cmd_analyze(obj, rep: Report, a) -> None:
    g = _graph_of(obj)
    rep.verdicts["row_finite"] = model.is_row_finite(g).row_finite
    rep.verdicts["sources"] = list(model.sources(g))
    rep.verdicts["scc"] = [list(c) for c in model.strongly_connected_components(g)]
    cyc = model.every_path_lies_on_cycle(g)
    entry = model.every_cycle_has_entry(g)
    rep.verdicts["every_path_lies_on_cycle"] = cyc.holds
    rep.verdicts["every_cycle_has_entry"] = entry.holds
    if entry.witness is not None:
        rep.note("entryless_cycle", entry.witness.label)
    rep.verdicts["radiating_vertices"] = list(model.radiating_vertices(g))
    s = certify(obj, a.max_length)
    v = algebra.semisimplicity_verdict(s, bound=a.max_length, truncation=a.truncation, seed=a.seed)
    rep.verdicts["semisimple"] = v.verdict == "semisimple"
    rep.verdicts["semisimplicity"] = v.verdict
    rep.note("semisimplicity", v)
    rep.note("reflexivity_hypotheses", algebra.reflexivity_hypotheses(s, min(a.max_length, 4)))
    rep.check("analysis_complete", True)


def cmd_gallery(name: str | None, rep: Report, a) -> None:
    names = [name] if name else gallery.list_fixtures()
    for n in names:
        try:
            res = gallery.run_fixture(n)
            rep.check(n, True, res)
        except ExpectationMismatch as exc:
            rep.check(n, False, {"fixture": n, "diff": exc.diff})


HANDLERS = {
    "check-axioms": cmd_check_axioms,
    "enumerate": cmd_enumerate,
    "fock-build": cmd_fock_build,
    "verify-ck": cmd_verify_ck,
    "cesaro": cmd_cesaro,
    "fourier": cmd_fourier,
    "analyze": cmd_analyze,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fockpath", description="Fock-space representations of graphs, k-graphs and categories of paths.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", nargs="?", help="structure file, '-' for stdin, or gallery:NAME")
    p.add_argument("--max-length", type=int, default=6)
    p.add_argument("--truncation", type=int, default=8)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_out", metavar="PATH", help="also write the report to PATH")
    return p


def _read(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    if spec.startswith("gallery:"):
        return gallery.fixture_text(spec.split(":", 1)[1])
    with open(spec, encoding="utf-8") as fh:
        return fh.read()


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    """Run one command; returns ``(report, exit_code)``."""
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return {"schema": SCHEMA, "error": "usage"}, 2 if exc.code else 0
    params = {
        "max_length": a.max_length,
        "truncation": a.truncation,
        "tolerance": a.tolerance,
        "seed": a.seed,
    }
    if a.command == "gallery":
        rep = Report("gallery", a.file or "", params)
        name = a.file.split(":", 1)[1] if a.file and a.file.startswith("gallery:") else a.file
        if name and name not in gallery.FIXTURES:
            return _error("gallery", f"unknown fixture {name!r}"), 2
        cmd_gallery(name, rep, a)
        out = rep.to_dict()
        return out, 0 if rep.ok else 1
    if not a.file:
        return _error(a.command, "a structure file is required"), 2
    try:
        text = _read(a.file)
        obj = build(parse(text))
    except ParseError as exc:
        return _error(a.command, str(exc), line=exc.line, column=exc.column), 2
    except (OSError, KeyError, ValueError, FockPathError) as exc:
        return _error(a.command, str(exc)), 2
    rep = Report(a.command, text, params)
    rep.note("kind", type(obj).__name__)
    try:
        HANDLERS[a.command](obj, rep, a)
    except FockPathError as exc:
        rep.check("upstream", False, {"error": type(exc).__name__, "message": str(exc)})
    return rep.to_dict(), 0 if rep.ok else 1


def _error(command: str, message: str, **where) -> dict:
    return {"schema": SCHEMA, "command": command, "error": message, **where, "ok": False}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv: list[str] | None = None) -> int:
    report, code = run(argv)
    text = dumps(report)
    sys.stdout.write(text)
    json_out = None
    if argv is None:
        argv = sys.argv[1:]
    if "--json" in argv:
        json_out = argv[argv.index("--json") + 1] if argv.index("--json") + 1 < len(argv) else None
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if code == 2 and "error" in report:
        sys.stderr.write(f"fockpath: {report['error']}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
