"""Text syntax for graph expressions.

    expr    := "K" "(" INT ")" | "path" "(" INT ")" | "Fp" "(" INT ")"
             | "fan" "(" INT { ";" key "=" list } ")"
             | ("circ" | "star") "(" expr "@" ref "," expr "@" ref ")"
    key     := "W" | "a" | "marks"
    list    := "[" [ item { "," item } ] "]"        item := INT | list
    ref     := INT [ ":" INT ]                      (label, or atom:label)

Whitespace (newlines included) is ignored.  One token of lookahead decides
every production.  Marks are resolved while parsing, so a bad ``@ref`` is
reported at its own position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BeiError, CompositionError, DslError
from .families import (
    Circ, FanAtom, FanSpec, FpAtom, KAtom, MarkRef, PathAtom, Star, _resolve_mark,
    compose_circ, compose_star, realize_atom,
)

_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<punct>[()\[\];=,@:])|(?P<bad>.)")
_ATOM_WORDS = ("K", "path", "Fp", "fan")
_OP_WORDS = ("circ", "star")
_FAN_KEYS = ("W", "a", "marks")


@dataclass(frozen=True)
class Token:
    kind: str   # "int", "name", "punct" or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind, col = m.lastgroup, m.start() - line_start + 1
        if kind == "ws":
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = m.start() + m.group().rfind("\n") + 1
            continue
        if kind == "bad":
            raise DslError(f"unexpected character {m.group()!r}", line, col)
        out.append(Token(kind, m.group(), line, col))
    out.append(Token("eof", "", line, len(text) - line_start + 1))
    return out


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, tok=None):
        tok = tok or self.tok
        raise DslError(f"unexpected {_describe(tok)}", tok.line, tok.col, expected)

    def semantic(self, message, tok):
        raise DslError(message, tok.line, tok.col, kind="semantic-error")

    def expect(self, text) -> Token:
        tok = self.tok
        if tok.text != text or tok.kind == "int":
            self.fail({text})
        self.i += 1
        return tok

    def integer(self) -> int:
        tok = self.tok
        if tok.kind != "int":
            self.fail({"INT"})
        self.i += 1
        return int(tok.text)

    def parse(self):
        expr, _ = self.expr()
        if self.tok.kind != "eof":
            self.fail({"end of input"})
        return expr

    # each production returns (expr, MarkedGraph) so marks resolve as we go
    def expr(self):
        tok = self.tok
        if tok.kind == "name" and tok.text in _ATOM_WORDS:
            atom = self.atom()
            try:
                return atom, realize_atom(atom)
            except CompositionError as e:
                self.semantic(str(e), tok)
        if tok.kind == "name" and tok.text in _OP_WORDS:
            return self.node()
        self.fail(set(_ATOM_WORDS + _OP_WORDS))

    def atom(self):
        head = self.tok
        self.i += 1
        self.expect("(")
        arg_tok = self.tok
        n = self.integer()
        try:
            if head.text == "fan":
                return self.fan(n, arg_tok)
            atom = {"K": KAtom, "path": PathAtom, "Fp": FpAtom}[head.text](n)
            realize_atom(atom)
        except BeiError as e:
            if isinstance(e, DslError):
                raise
            self.semantic(str(e), arg_tok)
        self.expect(")")
        return atom

    def fan(self, n, start):
        opts = {}
        while self.tok.text == ";":
            self.i += 1
            key = self.tok
            if key.kind != "name" or key.text not in _FAN_KEYS:
                self.fail(set(_FAN_KEYS))
            if key.text in opts:
                self.semantic(f"duplicate fan option {key.text}", key)
            self.i += 1
            self.expect("=")
            opts[key.text] = (self.nested(), key)
        if self.tok.text != ")":
            self.fail({";", ")"})
        W = opts.get("W", ((), None))[0]
        if any(not isinstance(p, tuple) for p in W):
            self.semantic("W must be a list of lists", opts["W"][1])
        pure = tuple(tuple(j + 1 for j in range(1, len(p) + 1)) for p in W)
        try:
            spec = FanSpec(n, W, pure)
        except BeiError as e:
            self.semantic(str(e), opts["W"][1] if "W" in opts else start)
        if "a" in opts:
            a, a_tok = opts["a"]
            if any(not isinstance(p, tuple) for p in a):
                self.semantic("a must be a list of lists", a_tok)
            try:
                spec = FanSpec(n, W, a)
            except BeiError as e:
                self.semantic(str(e), a_tok)
        marks = None
        if "marks" in opts:
            marks, m_tok = opts["marks"]
            if any(isinstance(x, tuple) for x in marks):
                self.semantic("marks must be a flat list of labels", m_tok)
            try:
                realize_atom(FanAtom(spec, marks))
            except BeiError as e:
                self.semantic(str(e), m_tok)
        self.expect(")")
        return FanAtom(spec, marks)

    def nested(self):
        self.expect("[")
        items = []
        if self.tok.text != "]":
            while True:
                if self.tok.text == "[":
                    items.append(self.nested())
                elif self.tok.kind == "int":
                    items.append(self.integer())
                else:
                    self.fail({"INT", "["})
                if self.tok.text == ",":
                    self.i += 1
                    continue
                if self.tok.text != "]":
                    self.fail({",", "]"})
                break
        self.expect("]")
        return tuple(items)

    def node(self):
        head = self.tok
        self.i += 1
        self.expect("(")
        left, lg = self.expr()
        lref, ltok = self.ref()
        self.expect(",")
        right, rg = self.expr()
        rref, rtok = self.ref()
        self.expect(")")
        fa = self.resolve(lg, lref, "left", ltok)
        fb = self.resolve(rg, rref, "right", rtok)
        cls, glue = (Circ, compose_circ) if head.text == "circ" else (Star, compose_star)
        try:
            mg = glue(lg, fa, rg, fb)
        except CompositionError as e:
            raise DslError(str(e), head.line, head.col, kind="semantic-error") from e
        return cls(left, right, lref, rref), mg

    def ref(self):
        at = self.expect("@")
        first = self.integer()
        if self.tok.text == ":":
            self.i += 1
            return MarkRef(self.integer(), first), at
        return MarkRef(first), at

    def resolve(self, mg, ref, side, tok):
        if ref.atom is not None and not 1 <= ref.atom <= mg.natoms:
            self.semantic(f"{side} operand has no atom {ref.atom}", tok)
        try:
            return _resolve_mark(mg, ref, side)
        except CompositionError as e:
            raise DslError(str(e), tok.line, tok.col, kind="semantic-error") from e


def parse_expr(text: str):
    """Parse expression text into a GraphExpr; raises DslError with line:col."""
    return _Parser(text).parse()


def _list(xs) -> str:
    return "[" + ",".join(_list(x) if isinstance(x, tuple) else str(x) for x in xs) + "]"


def emit(expr) -> str:
    """Canonical text; parse_expr(emit(e)) == e."""
    if isinstance(expr, KAtom):
        return f"K({expr.n})"
    if isinstance(expr, PathAtom):
        return f"path({expr.t})"
    if isinstance(expr, FpAtom):
        return f"Fp({expr.p})"
    if isinstance(expr, FanAtom):
        s = expr.spec
        parts = [str(s.n)]
        if s.partition:
            parts.append(f"W={_list(s.partition)}")
            parts.append(f"a={_list(s.branch_sizes)}")
        if expr.marks is not None:
            parts.append(f"marks={_list(expr.marks)}")
        return "fan(" + "; ".join(parts) + ")"
    if isinstance(expr, (Circ, Star)):
        op = "circ" if isinstance(expr, Circ) else "star"
        return f"{op}({emit(expr.left)}@{_ref(expr.lmark)}, {emit(expr.right)}@{_ref(expr.rmark)})"
    raise TypeError(f"not a graph expression: {expr!r}")


def _ref(r: MarkRef) -> str:
    return str(r.label) if r.atom is None else f"{r.atom}:{r.label}"
