"""Text format for graphs, k-graph skeletons and category presentations.

::

    kgraph 2 {
      vertices u1 u2 u3 u4;
      edge b1: 1: u1 -> u2;      # id, color, source -> range
      edge r1: 2: u1 -> u3;
      ...
      square: b2 r1 = r2 b1;
    }

Words are written left to right but compose right to left: ``b2 r1``
traverses ``r1`` first.  Ids must be declared before use.  ``#`` starts a
comment.  Categories accept ``relation:`` lines and ``degree id = (1, 0);``
(or a bare integer); k-graphs accept ``square:`` lines and require a color on
every edge; plain graphs accept neither.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DSLSyntaxError, KindMismatch, UndeclaredId
from .model import DirectedGraph, Edge
from .presentations.category import CategoryPresentation
from .presentations.kgraph import KGraphSkeleton

Word = tuple[str, ...]

_TOKEN = re.compile(r"\s+|#[^\n]*|->|[{}();:=,]|[A-Za-z0-9_.']+")


@dataclass(frozen=True)
class EdgeDecl:
    id: str
    source: str
    range: str
    color: int | None = None


@dataclass(frozen=True)
class StructureFile:
    kind: str
    rank: int | None = None
    vertices: tuple[str, ...] = ()
    edges: tuple[EdgeDecl, ...] = ()
    squares: tuple[tuple[Word, Word], ...] = ()
    relations: tuple[tuple[Word, Word], ...] = ()
    degrees: tuple[tuple[str, tuple[int, ...]], ...] = ()


@dataclass
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, line, col, pos = [], 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        s = m.group(0)
        if not (s.isspace() or s.startswith("#")):
            toks.append(_Tok(s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        last = self.toks[-1] if self.toks else _Tok("", 1, 1)
        self.eof = _Tok("<end of input>", last.line, last.col + len(last.text))

    def peek(self, k: int = 0) -> _Tok:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise DSLSyntaxError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def ident(self, what: str) -> _Tok:
        t = self.next()
        if t is self.eof or not re.fullmatch(r"[A-Za-z0-9_.']+", t.text) or t.text == "->":
            raise DSLSyntaxError(f"expected {what}, found {t.text!r}", t.line, t.col)
        return t

    def integer(self, what: str) -> int:
        t = self.next()
        if not re.fullmatch(r"-?\d+", t.text):
            raise DSLSyntaxError(f"expected {what}, found {t.text!r}", t.line, t.col)
        return int(t.text)

    def parse(self) -> StructureFile:
        head = self.next()
        if head.text not in ("graph", "kgraph", "category"):
            raise DSLSyntaxError(f"expected 'graph', 'kgraph' or 'category', found {head.text!r}", head.line, head.col)
        kind = head.text
        rank = None
        if kind == "kgraph":
            rank = self.integer("rank")
            if rank < 1:
                raise DSLSyntaxError("rank must be positive", head.line, head.col)
        self.expect("{")
        vertices: list[str] = []
        vset: set[str] = set()
        edges: list[EdgeDecl] = []
        eset: dict[str, EdgeDecl] = {}
        squares, relations, degrees = [], [], []
        while self.peek().text != "}":
            t = self.next()
            if t is self.eof:
                raise DSLSyntaxError("missing '}'", t.line, t.col)
            if t.text == "vertices":
                while self.peek().text != ";":
                    v = self.ident("vertex id")
                    if v.text in vset:
                        raise DSLSyntaxError(f"duplicate vertex id {v.text!r}", v.line, v.col)
                    vset.add(v.text)
                    vertices.append(v.text)
                self.expect(";")
            elif t.text == "edge":
                e = self.ident("edge id")
                if e.text in eset:
                    raise DSLSyntaxError(f"duplicate edge id {e.text!r}", e.line, e.col)
                self.expect(":")
                color = None
                if self.peek(1).text == ":":
                    ct = self.peek()
                    color = self.integer("color")
                    self.expect(":")
                    if kind != "kgraph":
                        raise KindMismatch(f"edge colors only apply to kgraph, not {kind}", ct.line, ct.col)
                    if not 1 <= color <= rank:
                        raise DSLSyntaxError(f"color {color} outside 1..{rank}", ct.line, ct.col)
                elif kind == "kgraph":
                    raise DSLSyntaxError(f"kgraph edge {e.text!r} needs a color", e.line, e.col)
                src = self.ident("source vertex")
                self.expect("->")
                rng = self.ident("range vertex")
                for v in (src, rng):
                    if v.text not in vset:
                        raise UndeclaredId(f"vertex {v.text!r} is not declared", v.line, v.col)
                self.expect(";")
                decl = EdgeDecl(e.text, src.text, rng.text, color)
                eset[e.text] = decl
                edges.append(decl)
            elif t.text in ("square", "relation"):
                wanted = "kgraph" if t.text == "square" else "category"
                if kind != wanted:
                    raise KindMismatch(f"'{t.text}' is not allowed in a {kind}", t.line, t.col)
                self.expect(":")
                lhs = self.word(eset, vset)
                self.expect("=")
                rhs = self.word(eset, vset)
                self.expect(";")
                (squares if t.text == "square" else relations).append((lhs, rhs))
            elif t.text == "degree":
                if kind != "category":
                    raise KindMismatch(f"'degree' is not allowed in a {kind}", t.line, t.col)
                e = self.ident("edge id")
                if e.text not in eset:
                    raise UndeclaredId(f"edge {e.text!r} is not declared", e.line, e.col)
                self.expect("=")
                degrees.append((e.text, self.vector()))
                self.expect(";")
            else:
                raise DSLSyntaxError(f"unknown declaration {t.text!r}", t.line, t.col)
        self.expect("}")
        extra = self.peek()
        if extra is not self.eof:
            raise DSLSyntaxError(f"unexpected {extra.text!r} after closing brace", extra.line, extra.col)
        return StructureFile(kind, rank, tuple(vertices), tuple(edges), tuple(squares), tuple(relations), tuple(degrees))

    def word(self, eset, vset) -> Word:
        out = []
        while self.peek().text not in ("=", ";"):
            t = self.ident("word letter")
            if t.text not in eset and t.text not in vset:
                raise UndeclaredId(f"edge {t.text!r} is not declared", t.line, t.col)
            out.append(t.text)
        if not out:
            t = self.peek()
            raise DSLSyntaxError("empty word", t.line, t.col)
        if len(out) > 1 and any(x in vset and x not in eset for x in out):
            t = self.peek()
            raise DSLSyntaxError("a vertex id can only appear alone", t.line, t.col)
        return tuple(out)

    def vector(self) -> tuple[int, ...]:
        if self.peek().text != "(":
            return (self.integer("degree"),)
        self.expect("(")
        vals = [self.integer("degree entry")]
        while self.peek().text == ",":
            self.next()
            vals.append(self.integer("degree entry"))
        self.expect(")")
        return tuple(vals)


def parse(text: str) -> StructureFile:
    """Parse DSL text; errors carry ``line`` and ``column``."""
    return _Parser(text).parse()


def print_structure(ast: StructureFile) -> str:
    """Canonical text for ``ast``; ``parse(print_structure(a)) == a``."""
    head = ast.kind if ast.kind != "kgraph" else f"kgraph {ast.rank}"
    lines = [f"{head} {{"]
    if ast.vertices:
        lines.append("  vertices " + " ".join(ast.vertices) + ";")
    for e in ast.edges:
        color = f" {e.color}:" if e.color is not None else ""
        lines.append(f"  edge {e.id}:{color} {e.source} -> {e.range};")
    for u, v in ast.squares:
        lines.append(f"  square: {' '.join(u)} = {' '.join(v)};")
    for u, v in ast.relations:
        lines.append(f"  relation: {' '.join(u)} = {' '.join(v)};")
    for e, vec in ast.degrees:
        lines.append(f"  degree {e} = ({', '.join(str(x) for x in vec)});")
    lines.append("}")
    return "\n".join(lines) + "\n"


def build(ast: StructureFile):
    """Turn a parsed file into a ``DirectedGraph``, ``KGraphSkeleton`` or ``CategoryPresentation``."""
    g = DirectedGraph(ast.vertices, tuple(Edge(e.id, e.source, e.range, e.color) for e in ast.edges))
    if ast.kind == "graph":
        return g
    if ast.kind == "kgraph":
        return KGraphSkeleton.from_words(ast.rank, g, [(" ".join(u), " ".join(v)) for u, v in ast.squares])
    degrees = dict(ast.degrees) if ast.degrees else None
    return CategoryPresentation.from_words(g, [(" ".join(u), " ".join(v)) for u, v in ast.relations], degrees)


def load(text: str):
    return build(parse(text))
