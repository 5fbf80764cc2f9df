"""The ``.ada`` automaton format and TSV data words.

An ``.ada`` file is a sequence of keyword sections; formulae use the
s-expression syntax and may span lines::

    ; comments run to the end of the line
    name: fig1
    events: a b
    vars: x y
    states: q0 q1 q2 q3 q4
    init: q0
    final: q3 q4
    rule q0 a (and q1 q2 (= x 0) (= y 0))
    rule q1 b (and q3 (>= (pre x) (pre y)))

Rules that are not listed are false.  Word files have one symbol per line:
the event, then one rational per declared variable, tab separated.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from . import logic as L
from .automaton import Automaton, DataWord, validate
from .logic import Sort
from .sexpr import Atom, SexprError, parse_number, print_formula, read_all, to_formula

KEYWORDS = ("name:", "events:", "vars:", "states:", "init:", "final:")


class AdaError(SexprError):
    pass


def _ident(tok, what: str) -> str:
    if not isinstance(tok, Atom):
        raise AdaError("syntax", f"expected {what}", tok.line, tok.col)
    if tok.text in KEYWORDS or tok.text == "rule" or parse_number(tok.text) is not None:
        raise AdaError("syntax", f"expected {what}, found {tok.text}", tok.line, tok.col)
    return tok.text


def parse_automaton(text: str, name: str = "") -> Automaton:
    try:
        return _parse_automaton(text, name)
    except AdaError:
        raise
    except SexprError as e:
        raise AdaError(e.code, e.msg, e.line, e.col) from None


def _parse_automaton(text: str, name: str) -> Automaton:
    items = read_all(text)
    sections: dict[str, list] = {}
    rules = []
    i = 0
    while i < len(items):
        tok = items[i]
        if not isinstance(tok, Atom):
            raise AdaError("syntax", "expected a keyword", tok.line, tok.col)
        kw = tok.text
        if kw == "rule":
            if i + 3 >= len(items):
                raise AdaError("syntax", "rule needs a state, an event and a formula", tok.line, tok.col)
            q = _ident(items[i + 1], "a state")
            a = _ident(items[i + 2], "an event")
            rules.append((q, a, items[i + 3], tok))
            i += 4
            continue
        if kw not in KEYWORDS:
            raise AdaError("syntax", f"unknown keyword {kw}", tok.line, tok.col)
        if kw in sections:
            raise AdaError("syntax", f"duplicate section {kw}", tok.line, tok.col)
        i += 1
        if kw == "init:":
            if i >= len(items):
                raise AdaError("syntax", "init: needs a formula", tok.line, tok.col)
            sections[kw] = [items[i], tok]
            i += 1
            continue
        vals = []
        while i < len(items) and not (isinstance(items[i], Atom) and
                                      (items[i].text.endswith(":") or items[i].text == "rule")):
            vals.append(items[i])
            i += 1
        sections[kw] = vals
    for kw in ("events:", "vars:", "states:", "init:"):
        if kw not in sections:
            raise AdaError("syntax", f"missing section {kw}", 1, 1)
    events = tuple(_ident(t, "an event name") for t in sections["events:"])
    xs = tuple(L.data(_ident(t, "a variable name")) for t in sections["vars:"])
    Q = tuple(L.state(_ident(t, "a state name")) for t in sections["states:"])
    declared = {x.name: Sort.DATA for x in xs}
    for q in Q:
        if q.name in declared:
            raise AdaError("sort", f"{q.name} declared both as a state and a variable", 1, 1)
        declared[q.name] = Sort.BOOL
    final = frozenset(L.state(_ident(t, "a state name")) for t in sections.get("final:", []))
    for t in sections.get("final:", []):
        if L.state(t.text) not in Q:
            raise AdaError("sort", f"final state {t.text} is not declared", t.line, t.col)
    init_expr, init_tok = sections["init:"]
    init = to_formula(init_expr, {q.name: Sort.BOOL for q in Q}, allow_prev=False)
    iname = name
    if "name:" in sections:
        iname = " ".join(t.text for t in sections["name:"] if isinstance(t, Atom))
    delta = {}
    for q, a, expr, tok in rules:
        if L.state(q) not in Q:
            raise AdaError("sort", f"rule for undeclared state {q}", tok.line, tok.col)
        if a not in events:
            raise AdaError("sort", f"rule for undeclared event {a}", tok.line, tok.col)
        if (L.state(q), a) in delta:
            raise AdaError("syntax", f"duplicate rule for {q} {a}", tok.line, tok.col)
        f = to_formula(expr, declared, allow_prev=True)
        path = L.negative_occurrence(f)
        if path is not None:
            raise AdaError("positivity", f"rule {q} {a}: state under odd negations at "
                           + " / ".join(path), tok.line, tok.col)
        delta[(L.state(q), a)] = f
    path = L.negative_occurrence(init)
    if path is not None:
        raise AdaError("positivity", "init: state under odd negations at " + " / ".join(path),
                       init_tok.line, init_tok.col)
    A = Automaton(events, xs, Q, init, final, delta, iname)
    diags = validate(A)
    if diags:
        raise AdaError("sort", "; ".join(map(str, diags)), 1, 1)
    return A


def load_automaton(path) -> Automaton:
    p = Path(path)
    return parse_automaton(p.read_text(encoding="utf-8"), name=p.stem)


def print_automaton(A: Automaton) -> str:
    lines = []
    if A.name:
        lines.append("name: " + re.sub(r"[^A-Za-z0-9_.'+-]", "_", A.name))
    lines.append("events: " + " ".join(A.events))
    lines.append("vars: " + " ".join(x.name for x in A.vars))
    lines.append("states: " + " ".join(q.name for q in A.states))
    lines.append("init: " + print_formula(A.init))
    lines.append("final: " + " ".join(q.name for q in A.states if q in A.final))
    for q in A.states:
        for a in A.events:
            f = A.delta[(q, a)]
            if f is not L.FALSE:
                lines.append(f"rule {q.name} {a} {print_formula(f)}")
    return "\n".join(lines) + "\n"


def parse_word(text: str, A: Automaton) -> DataWord:
    syms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t") if "\t" in line else line.split()
        ev, vals = cols[0], cols[1:]
        if ev not in A.events:
            raise AdaError("sort", f"unknown event {ev}", lineno, 1)
        if len(vals) != len(A.vars):
            raise AdaError("syntax", f"expected {len(A.vars)} values, found {len(vals)}", lineno, 1)
        nu = {}
        for x, v in zip(A.vars, vals):
            n = parse_number(v.strip())
            if n is None:
                raise AdaError("lexical", f"bad rational {v!r}", lineno, 1)
            nu[x] = n
        syms.append((ev, nu))
    return DataWord(tuple(syms))


def print_word(w: DataWord, A: Automaton) -> str:
    from .sexpr import print_number
    out = []
    for ev, nu in w:
        out.append("\t".join([ev] + [print_number(Fraction(nu[x])) for x in A.vars]))
    return "".join(line + "\n" for line in out)
