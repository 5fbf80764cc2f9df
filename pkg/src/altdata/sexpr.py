"""S-expression surface syntax for formulae and terms.

    (and f ...) (or f ...) (not f) (=> f g) (exists (v ...) f)
    (<= t t) (< t t) (= t t) (>= t t) (> t t)
    (+ t ...) (- t ...) (* c t) (/ t c) (pre x)  numerals: 3 -2 1/2 0.25

Identifiers in formula position are boolean (states), in term position data
variables.  When the caller supplies the declared names, uses are checked
against them instead.  ``x@3`` denotes a time-stamped variable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import logic as L
from .logic import Formula, LogicError, Sort, Term, Var


class SexprError(LogicError):
    """Parse failure; ``code`` is one of lexical, syntax, sort, positivity."""

    def __init__(self, code: str, message: str, line: int = 0, col: int = 0):
        self.code = code
        self.msg = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{code} error: {message}")


@dataclass
class Atom:
    text: str
    line: int
    col: int


@dataclass
class Node:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'.!]*(@[0-9]+)?$")
_NUMBER = re.compile(r"-?[0-9]+(\.[0-9]+)?(/[0-9]+)?$")


def tokenize(text: str, line0: int = 1, col0: int = 1):
    line, col = line0, col0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SexprError("lexical", f"unexpected character {text[pos]!r}", line, col)
        tok = m.group(0)
        if not tok.isspace() and not tok.startswith(";"):
            yield Atom(tok, line, col)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()


def read_all(text: str, line0: int = 1, col0: int = 1) -> list:
    stack: list[Node] = []
    out: list = []
    for tok in tokenize(text, line0, col0):
        if tok.text == "(":
            stack.append(Node([], tok.line, tok.col))
        elif tok.text == ")":
            if not stack:
                raise SexprError("syntax", "unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            (stack[-1].items if stack else out).append(tok)
    if stack:
        n = stack[-1]
        raise SexprError("syntax", "unclosed '('", n.line, n.col)
    return out


def read_one(text: str, line0: int = 1, col0: int = 1):
    items = read_all(text, line0, col0)
    if len(items) != 1:
        line, col = (items[1].line, items[1].col) if len(items) > 1 else (line0, col0)
        raise SexprError("syntax", f"expected one expression, found {len(items)}", line, col)
    return items[0]


def parse_number(text: str) -> Fraction | None:
    if not _NUMBER.match(text):
        return None
    try:
        return Fraction(text)
    except ZeroDivisionError:
        return None


class _Scope:
    """Name resolution; ``declared`` maps names to sorts when checking is on."""

    def __init__(self, declared: dict[str, Sort] | None, allow_prev: bool):
        self.declared = declared
        self.allow_prev = allow_prev
        self.bound: list[dict[str, Sort | None]] = []

    def lookup(self, name: str, want: Sort, tok: Atom) -> Var:
        base, _, stamp = name.partition("@")
        for frame in reversed(self.bound):
            if base in frame:
                s = frame[base]
                if s is None:
                    frame[base] = s = want
                if s is not want:
                    raise SexprError("sort", f"{base} is {s.value}, used as {want.value}",
                                     tok.line, tok.col)
                return Var(base, want, int(stamp) if stamp else None)
        if self.declared is not None:
            s = self.declared.get(base)
            if s is None:
                raise SexprError("sort", f"undeclared identifier {base}", tok.line, tok.col)
            if s is not want:
                raise SexprError("sort", f"{base} is {s.value}, used as {want.value}",
                                 tok.line, tok.col)
        return Var(base, want, int(stamp) if stamp else None)


def _head(node: Node) -> str:
    if not node.items or not isinstance(node.items[0], Atom):
        raise SexprError("syntax", "expected an operator", node.line, node.col)
    return node.items[0].text


def _term(e, sc: _Scope) -> Term:
    if isinstance(e, Atom):
        n = parse_number(e.text)
        if n is not None:
            return Term.of(n)
        if not _IDENT.match(e.text):
            raise SexprError("lexical", f"bad identifier {e.text!r}", e.line, e.col)
        return Term.of(sc.lookup(e.text, Sort.DATA, e))
    op = _head(e)
    args = e.items[1:]
    if op == "pre":
        if len(args) != 1 or not isinstance(args[0], Atom):
            raise SexprError("syntax", "(pre x) takes one variable", e.line, e.col)
        if not sc.allow_prev:
            raise SexprError("sort", "previous values are not allowed here", e.line, e.col)
        v = sc.lookup(args[0].text, Sort.DATA, args[0])
        return Term.of(v.previous())
    ts = [_term(a, sc) for a in args]
    if op == "+":
        out = Term()
        for t in ts:
            out = out + t
        return out
    if op == "-":
        if not ts:
            raise SexprError("syntax", "(-) needs an argument", e.line, e.col)
        if len(ts) == 1:
            return -ts[0]
        out = ts[0]
        for t in ts[1:]:
            out = out - t
        return out
    if op == "*":
        out = Term.of(1)
        for t in ts:
            if not out.coeffs:
                out = t * out.const
            elif not t.coeffs:
                out = out * t.const
            else:
                raise SexprError("sort", "nonlinear multiplication", e.line, e.col)
        return out
    if op == "/":
        if len(ts) != 2 or ts[1].coeffs or ts[1].const == 0:
            raise SexprError("sort", "division only by a nonzero constant", e.line, e.col)
        return ts[0] * (1 / ts[1].const)
    raise SexprError("syntax", f"unknown term operator {op}", e.line, e.col)


_RELS = {"=": "=", "<=": "<=", "<": "<", ">=": ">=", ">": ">"}


def _formula(e, sc: _Scope) -> Formula:
    if isinstance(e, Atom):
        if e.text == "true":
            return L.TRUE
        if e.text == "false":
            return L.FALSE
        if parse_number(e.text) is not None:
            raise SexprError("sort", f"number {e.text} used as a formula", e.line, e.col)
        if not _IDENT.match(e.text):
            raise SexprError("lexical", f"bad identifier {e.text!r}", e.line, e.col)
        return L.bvar(sc.lookup(e.text, Sort.BOOL, e))
    op = _head(e)
    args = e.items[1:]
    if op == "and":
        return L.And(*(_formula(a, sc) for a in args))
    if op == "or":
        return L.Or(*(_formula(a, sc) for a in args))
    if op == "not":
        if len(args) != 1:
            raise SexprError("syntax", "(not f) takes one argument", e.line, e.col)
        return L.Not(_formula(args[0], sc))
    if op in ("=>", "implies"):
        if len(args) != 2:
            raise SexprError("syntax", "(=> f g) takes two arguments", e.line, e.col)
        return L.Or(L.Not(_formula(args[0], sc)), _formula(args[1], sc))
    if op == "exists":
        if len(args) != 2 or not isinstance(args[0], Node):
            raise SexprError("syntax", "(exists (v ...) f)", e.line, e.col)
        frame: dict[str, Sort | None] = {}
        order = []
        for b in args[0].items:
            if isinstance(b, Atom):
                frame[b.text] = None
                order.append(b.text)
            elif len(b.items) == 2 and all(isinstance(x, Atom) for x in b.items):
                sname = b.items[1].text
                if sname not in ("Bool", "Data"):
                    raise SexprError("sort", f"unknown sort {sname}", b.line, b.col)
                frame[b.items[0].text] = Sort(sname)
                order.append(b.items[0].text)
            else:
                raise SexprError("syntax", "bad binder", b.line, b.col)
        sc.bound.append(frame)
        try:
            body = _formula(args[1], sc)
        finally:
            sc.bound.pop()
        vs = [Var(n, frame[n]) for n in order if frame[n] is not None]
        return L.Exists(vs, body)
    if op in _RELS:
        if len(args) < 2:
            raise SexprError("syntax", f"({op} ...) needs two terms", e.line, e.col)
        ts = [_term(a, sc) for a in args]
        return L.And(*(L.compare(ts[i], _RELS[op], ts[i + 1]) for i in range(len(ts) - 1)))
    raise SexprError("syntax", f"unknown operator {op}", e.line, e.col)


def to_formula(e, declared: dict[str, Sort] | None = None, allow_prev: bool = True) -> Formula:
    return _formula(e, _Scope(declared, allow_prev))


def parse_formula(text: str, declared: dict[str, Sort] | None = None,
                  allow_prev: bool = True) -> Formula:
    return to_formula(read_one(text), declared, allow_prev)


def parse_term(text: str, declared: dict[str, Sort] | None = None) -> Term:
    return _term(read_one(text), _Scope(declared, True))


# ---------------------------------------------------------------------------
# Printing


def print_number(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono(v: Var, c: Fraction) -> str:
    if c == 1:
        return str(v)
    if c == -1:
        return f"(- {v})"
    return f"(* {print_number(c)} {v})"


def print_term(t: Term) -> str:
    parts = [_mono(v, c) for v, c in t.coeffs]
    if t.const != 0 or not parts:
        parts.append(print_number(t.const))
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def print_formula(f: Formula) -> str:
    out: list[str] = []

    def go(g):
        k = g.kind
        if k == L.TRUE_K:
            out.append("true")
        elif k == L.FALSE_K:
            out.append("false")
        elif k == L.VAR_K:
            out.append(str(g.var))
        elif k == L.ATOM_K:
            out.append(f"({g.op} {print_term(g.term)} {print_number(g.rhs)})")
        elif k == L.NOT_K:
            out.append("(not ")
            go(g.args[0])
            out.append(")")
        elif k in (L.AND_K, L.OR_K):
            out.append("(and" if k == L.AND_K else "(or")
            for c in g.args:
                out.append(" ")
                go(c)
            out.append(")")
        else:
            bs = " ".join(f"({v} {v.sort.value})" for v in sorted(g.bound))
            out.append(f"(exists ({bs}) ")
            go(g.body)
            out.append(")")

    go(f)
    return "".join(out)


def pretty(f: Formula, width: int = 78, indent: int = 0) -> str:
    """Multi-line rendering for long formulae."""
    flat = print_formula(f)
    if len(flat) + indent <= width or f.kind not in (L.AND_K, L.OR_K, L.EXISTS_K, L.NOT_K):
        return flat
    pad = " " * (indent + 2)
    if f.kind == L.NOT_K:
        return "(not\n" + pad + pretty(f.args[0], width, indent + 2) + ")"
    if f.kind == L.EXISTS_K:
        bs = " ".join(f"({v} {v.sort.value})" for v in sorted(f.bound))
        return f"(exists ({bs})\n" + pad + pretty(f.body, width, indent + 2) + ")"
    head = "(and" if f.kind == L.AND_K else "(or"
    return head + "".join("\n" + pad + pretty(c, width, indent + 2) for c in f.args) + ")"

