"""Alternating data automata: the type, validation, closure and membership."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import logic as L
from .logic import Formula, Sort, Var


@dataclass(frozen=True)
class Diagnostic:
    where: str  # "init", "final", "rule q a", ...
    message: str

    def __str__(self):
        return f"{self.where}: {self.message}"


class InvalidAutomaton(L.LogicError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class DataWord:
    """Sequence of (event, valuation) pairs; valuations map data variables to rationals."""

    symbols: tuple[tuple[str, Mapping[Var, Fraction]], ...] = ()

    @staticmethod
    def of(items: Iterable[tuple[str, Mapping]]) -> "DataWord":
        out = []
        for a, nu in items:
            out.append((a, {(L.data(k) if isinstance(k, str) else k): Fraction(v)
                            for k, v in nu.items()}))
        return DataWord(tuple(out))

    @property
    def events(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __str__(self):
        if not self.symbols:
            return "ε"
        parts = []
        for a, nu in self.symbols:
            vals = ",".join(str(nu[v]) for v in sorted(nu))
            parts.append(f"({a},<{vals}>)")
        return "".join(parts)


@dataclass(frozen=True, eq=False)
class Automaton:
    """``<x, Q, iota, F, Delta>`` over the ordered event set ``events``."""

    events: tuple[str, ...]
    vars: tuple[Var, ...]
    states: tuple[Var, ...]
    init: Formula
    final: frozenset[Var]
    delta: Mapping[tuple[Var, str], Formula] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        total = {}
        for q in self.states:
            for a in self.events:
                total[(q, a)] = self.delta.get((q, a), L.FALSE)
        for k, f in self.delta.items():
            total.setdefault(k, f)  # stray keys are kept so that validate reports them
        object.__setattr__(self, "delta", total)
        object.__setattr__(self, "final", frozenset(self.final))

    def rule(self, q: Var, a: str) -> Formula:
        return self.delta.get((q, a), L.FALSE)

    @property
    def nonfinal(self) -> tuple[Var, ...]:
        return tuple(q for q in self.states if q not in self.final)

    @property
    def size(self) -> int:
        return self.init.size + sum(f.size for f in self.delta.values())

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return (self.events == other.events and self.vars == other.vars
                and self.states == other.states and self.init is other.init
                and self.final == other.final
                and all(self.delta[k] is other.delta.get(k) for k in self.delta)
                and len(self.delta) == len(other.delta))

    __hash__ = object.__hash__

    def validate(self) -> list[Diagnostic]:
        return validate(self)

    def checked(self) -> "Automaton":
        d = validate(self)
        if d:
            raise InvalidAutomaton(d)
        return self


def validate(A: Automaton) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    Q = set(A.states)
    xs = set(A.vars)
    if len(Q) != len(A.states):
        out.append(Diagnostic("states", "duplicate state names"))
    if len(xs) != len(A.vars):
        out.append(Diagnostic("vars", "duplicate variable names"))
    if len(set(A.events)) != len(A.events):
        out.append(Diagnostic("events", "duplicate event names"))
    for q in A.states:
        if q.sort is not Sort.BOOL or q.stamp is not None:
            out.append(Diagnostic("states", f"{q} is not a plain boolean variable"))
    for x in A.vars:
        if x.sort is not Sort.DATA or x.stamp is not None or x.prev:
            out.append(Diagnostic("vars", f"{x} is not a plain data variable"))
    if A.init.fv_data:
        out.append(Diagnostic("init", "the initial configuration must not mention data variables "
                                      f"(found {', '.join(map(str, sorted(A.init.fv_data)))})"))
    out.extend(_check_formula("init", A.init, Q, set()))
    for q in A.final:
        if q not in Q:
            out.append(Diagnostic("final", f"{q} is not a state"))
    allowed = xs | {x.previous() for x in xs}
    for (q, a), f in A.delta.items():
        out.extend(_check_formula(f"rule {q} {a}", f, Q, allowed))
    for (q, a) in A.delta:
        if q not in Q or a not in A.events:
            out.append(Diagnostic(f"rule {q} {a}", "unknown state or event"))
    return out


def _check_formula(where: str, f: Formula, Q: set, allowed_data: set) -> list[Diagnostic]:
    out = []
    path = L.negative_occurrence(f)
    if path is not None:
        out.append(Diagnostic(where, "state under odd negations at " + " / ".join(path)))
    extra_q = {v for v in f.fv_bool if v not in Q}
    if extra_q:
        out.append(Diagnostic(where, "unknown states " + ", ".join(map(str, sorted(extra_q)))))
    if allowed_data:
        extra_x = {v for v in f.fv_data if v not in allowed_data}
        if extra_x:
            out.append(Diagnostic(where, "unknown data variables " + ", ".join(map(str, sorted(extra_x)))))
    if _has_exists(f):
        out.append(Diagnostic(where, "quantifiers are not allowed in rules"))
    return out


def _has_exists(f: Formula) -> bool:
    if f.kind == L.EXISTS_K:
        return True
    return any(_has_exists(c) for c in f.children)


# ---------------------------------------------------------------------------
# Boolean closure


def _rename_states(A: Automaton, taken: set[str]) -> Automaton:
    """Rename every state of ``A`` so that no name is in ``taken``."""
    suffix = 2
    while True:
        names = {q: f"{q.name}.{suffix}" for q in A.states}
        if not (set(names.values()) & taken) and not any(n in {q.name for q in A.states}
                                                           for n in names.values()):
            break
        suffix += 1
    ren = {q: L.state(n) for q, n in names.items()}
    return Automaton(
        A.events, A.vars, tuple(ren[q] for q in A.states), L.rename(A.init, ren),
        frozenset(ren[q] for q in A.final),
        {(ren[q], a): L.rename(f, ren) for (q, a), f in A.delta.items()}, A.name)


def boolean_combine(A1: Automaton, A2: Automaton, mode: str) -> Automaton:
    """Union or intersection.  States of ``A2`` are renamed if they clash."""
    if mode not in ("union", "intersection"):
        raise ValueError(f"unknown mode {mode!r}")
    if {x.name for x in A1.vars} != {x.name for x in A2.vars}:
        raise L.LogicError("automata over different data variables cannot be combined")
    names1 = {q.name for q in A1.states}
    if names1 & {q.name for q in A2.states}:
        A2 = _rename_states(A2, names1)
    events = A1.events + tuple(a for a in A2.events if a not in A1.events)
    delta = dict(A1.delta)
    delta.update(A2.delta)
    init = L.Or(A1.init, A2.init) if mode == "union" else L.And(A1.init, A2.init)
    tag = "|" if mode == "union" else "&"
    return Automaton(events, A1.vars, A1.states + A2.states, init, A1.final | A2.final,
                     delta, f"({A1.name}{tag}{A2.name})")


def union(A1: Automaton, A2: Automaton) -> Automaton:
    return boolean_combine(A1, A2, "union")


def intersection(A1: Automaton, A2: Automaton) -> Automaton:
    return boolean_combine(A1, A2, "intersection")


def complement(A: Automaton) -> Automaton:
    return Automaton(A.events, A.vars, A.states, L.dualize(A.init),
                     frozenset(A.states) - A.final,
                     {k: L.dualize(f) for k, f in A.delta.items()}, f"~{A.name}")


# ---------------------------------------------------------------------------
# Membership


def run_formulas(A: Automaton, events: Sequence[str]) -> list[Formula]:
    """The run phi_0 => phi_1 => ... over an event sequence (data symbolic)."""
    phis = [A.init]
    for k, a in enumerate(events):
        phis.append(L.rewrite_step(phis[-1], a, A.delta, k))
    return phis


def membership(A: Automaton, w: DataWord, engine=None) -> bool:
    """Does ``A`` accept ``w``?  Initial data values are existentially chosen."""
    for a, nu in w:
        if a not in A.events:
            raise L.LogicError(f"event {a} is not in the alphabet")
        missing = [x for x in A.vars if x not in nu]
        if missing:
            raise L.UnboundVariableError(f"no value for {', '.join(map(str, missing))}")
    phi = A.init
    known: dict = {}
    for k, (a, nu) in enumerate(w):
        phi = L.rewrite_step(phi, a, A.delta, k)
        # plug in every known value (later rules read x_k as a previous value)
        known.update({x.at(k + 1): L.Term.of(v) for x, v in nu.items() if x in A.vars})
        phi = L.substitute(phi, known, simplify=True)
    sigma = {q: L.const(q in A.final) for q in phi.fv_bool}
    phi = L.substitute(phi, sigma, simplify=True)
    if phi.is_const():
        return phi is L.TRUE
    if engine is None:
        from . import smt
        return smt.check_sat(phi).sat
    return engine.is_sat(phi)
