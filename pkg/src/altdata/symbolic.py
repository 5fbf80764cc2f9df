"""Symbolic semantics shared by the emptiness procedures.

Post-images, predicate abstraction, the time-stamped unfolding of a run
into an interpolation problem, interpolant positivization and the naive
bounded enumeration used as a reference oracle.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import fm
from . import logic as L
from .automaton import Automaton, DataWord
from .logic import Formula, Var
from .smt import Engine, SatResult


def acceptance(A: Automaton) -> Formula:
    """``AND (q -> false)`` over the non-final states (unstamped)."""
    return L.conj(*(L.Not(L.bvar(q)) for q in A.nonfinal))


def post(A: Automaton, phi: Formula, a: str) -> Formula:
    """``exists xbar . Delta(phi[xbar/x], a)``."""
    if phi.is_const():
        return phi
    to_prev = {x: x.previous() for x in A.vars if x in phi.fv}
    shifted = L.rename(phi, to_prev) if to_prev else phi
    sigma = {q: A.rule(q, a) for q in shifted.fv_bool if q.stamp is None}
    body = L.substitute(shifted, sigma, simplify=True)
    return L.Exists([x.previous() for x in A.vars], body)


def post_word(A: Automaton, phi: Formula, events: Iterable[str]) -> Formula:
    for a in events:
        phi = post(A, phi, a)
    return phi


class PredicateSet:
    """Ordered, duplicate-free predicates; always contains false."""

    def __init__(self, preds: Iterable[Formula] = ()):
        self._items: list[Formula] = [L.FALSE]
        self._seen = {L.FALSE}
        for p in preds:
            self.add(p)

    def add(self, p: Formula) -> bool:
        p = L.simplify(p)
        if p is L.TRUE or p in self._seen:
            return False
        self._seen.add(p)
        self._items.append(p)
        return True

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, p):
        return p in self._seen


def abstract_image(phi: Formula, preds: Iterable[Formula], engine: Engine, memo: dict | None = None) -> Formula:
    """Conjunction of the predicates entailed by ``phi``."""
    if memo is None:
        memo = {}

    def ent(p):
        key = (phi, p)
        r = memo.get(key)
        if r is None:
            r = engine.entails(phi, p)
            memo[key] = r
        return r

    if ent(L.FALSE):
        return L.FALSE
    return L.conj(*(p for p in preds if p is not L.FALSE and ent(p)))


def abstract_post_word(A: Automaton, events: Sequence[str], preds, engine: Engine,
                       memo: dict | None = None) -> Formula:
    phi = A.init
    for a in events:
        phi = abstract_image(post(A, phi, a), preds, engine, memo)
    return phi


def abstract_accept(A: Automaton, events: Sequence[str], preds, engine: Engine) -> Formula:
    """Abstract acceptance replayed from scratch along ``events``."""
    return L.conj(abstract_post_word(A, events, preds, engine), acceptance(A))


# ---------------------------------------------------------------------------
# Unfolding


@dataclass
class UnfoldingProblem:
    events: tuple[str, ...]
    thetas: list[Formula]  # theta_0 .. theta_{n+1}
    rsets: list[frozenset[Var]]  # R_0 .. R_n (stamped states)

    @property
    def formula(self) -> Formula:
        return L.conj(*self.thetas)

    @property
    def reach(self) -> Formula:
        """Everything except the acceptance conjunct."""
        return L.conj(*self.thetas[:-1])


def _step_theta(A: Automaton, rset: frozenset[Var], a: str, k: int) -> Formula:
    parts = []
    for qk in sorted(rset):
        q = qk.base()
        rule = L.time_stamp(A.rule(q, a), k - 1, k, states=k)
        parts.append(L.implies(L.bvar(qk), rule))
    return L.conj(*parts)


def build_theta(A: Automaton, events: Sequence[str], seed: Formula | None = None) -> UnfoldingProblem:
    """``Theta(u)``; with ``seed`` the first conjunct is ``seed`` stamped at 0
    (states and data), as needed for suffixes starting at an inner node."""
    for a in events:
        if a not in A.events:
            raise L.LogicError(f"event {a} is not in the alphabet")
    theta0 = L.stamp_all(seed, 0) if seed is not None else L.time_stamp(A.init, None, None, states=0)
    thetas = [theta0]
    rsets = [theta0.fv_bool]
    for k, a in enumerate(events, start=1):
        th = _step_theta(A, rsets[-1], a, k)
        thetas.append(th)
        rsets.append(frozenset(q for q in th.fv_bool if q.stamp == k))
    n = len(events)
    thetas.append(L.conj(*(L.Not(L.bvar(q.at(n))) for q in A.nonfinal)))
    return UnfoldingProblem(tuple(events), thetas, rsets)


def word_from_model(A: Automaton, events: Sequence[str], model: dict) -> DataWord:
    syms = []
    for k, a in enumerate(events, start=1):
        nu = {x: Fraction(model.get(x.at(k), 0)) for x in A.vars}
        syms.append((a, nu))
    return DataWord(tuple(syms))


@dataclass
class Feasibility:
    result: SatResult
    witness: DataWord | None = None

    @property
    def sat(self) -> bool:
        return self.result.sat


def feasibility(A: Automaton, events: Sequence[str], engine: Engine) -> Feasibility:
    prob = build_theta(A, events)
    res = engine.check_sat(prob.formula)
    w = word_from_model(A, events, res.model) if res.sat else None
    return Feasibility(res, w)


# ---------------------------------------------------------------------------
# Interpolants over unstamped variables


def unstamp_sequence(itps: Sequence[Formula]) -> list[Formula]:
    """``[true, I_0, .., I_n, false]`` stamped per position to the unstamped form."""
    out = [itps[0]]
    for i, f in enumerate(itps[1:-1]):
        out.append(L.unstamp(f, i))
    out.append(itps[-1])
    return out


def contract_violations(prob: UnfoldingProblem, itps: Sequence[Formula], engine: Engine) -> list[str]:
    """Check an unstamped sequence ``[true, I_0..I_n, false]`` against ``prob``."""
    th = prob.thetas
    n = len(th) - 2
    if len(itps) != n + 3:
        return [f"expected {n + 3} formulae, got {len(itps)}"]
    I = list(itps[1:-1])
    bad = []
    if not engine.entails(th[0], L.stamp_all(I[0], 0)):
        bad.append("theta_0 does not entail I_0")
    for i in range(1, n + 1):
        if not engine.entails(L.conj(L.stamp_all(I[i - 1], i - 1), th[i]), L.stamp_all(I[i], i)):
            bad.append(f"I_{i - 1} and theta_{i} do not entail I_{i}")
    if engine.is_sat(L.conj(L.stamp_all(I[n], n), th[n + 1])):
        bad.append(f"I_{n} is consistent with acceptance")
    for i, f in enumerate(I):
        if any(v.prev or v.stamp is not None for v in f.fv):
            bad.append(f"I_{i} is not over unstamped variables")
        if not L.is_positive(f):
            bad.append(f"I_{i} has a negative state occurrence")
    return bad


def positivize(A: Automaton, prob: UnfoldingProblem, itps: Sequence[Formula],
               seed: Formula | None = None) -> list[Formula]:
    """Replace elements with negative state occurrences.

    ``I_0`` falls back to the (unstamped) first conjunct and ``I_i`` to an
    exact quantifier-free form of the post-image of ``I_{i-1}``.
    """
    out = list(itps)
    if all(L.is_positive(f) for f in out):
        return out
    if not L.is_positive(out[1]):
        out[1] = seed if seed is not None else A.init
    for i in range(1, len(prob.events) + 1):
        j = i + 1
        if not L.is_positive(out[j]):
            out[j] = exact_post(A, out[j - 1], prob.events[i - 1])
    return out


def exact_post(A: Automaton, phi: Formula, a: str) -> Formula:
    """Quantifier-free equivalent of ``post(phi, a)`` (by Fourier-Motzkin)."""
    p = post(A, phi, a)
    keep = set(A.vars) | set(A.states)
    return L.simplify(fm.project(p, keep, limit=None))


def interpolants(A: Automaton, prob: UnfoldingProblem, engine: Engine, strategy: str = "proof",
                 seed: Formula | None = None, check: bool = False) -> list[Formula]:
    """Positive unstamped interpolation sequence for an unsatisfiable unfolding."""
    raw = engine.interpolate_sequence(prob.thetas, strategy)
    seq = positivize(A, prob, unstamp_sequence(raw), seed)
    if check:
        bad = contract_violations(prob, seq, engine)
        if bad:
            raise AssertionError("interpolation contract violated: " + "; ".join(bad))
    return seq


# ---------------------------------------------------------------------------
# Bounded enumeration


@dataclass
class OracleResult:
    witness: DataWord | None
    bound: int
    explored: int = 0

    @property
    def empty_up_to_bound(self) -> bool:
        return self.witness is None


def bounded_oracle(A: Automaton, k: int, engine: Engine | None = None) -> OracleResult:
    """Enumerate event sequences up to length ``k`` shortest-first, in
    declaration order within a length; prefixes whose reachability part is
    already unsatisfiable are pruned (no extension can be feasible)."""
    engine = engine or Engine()
    acc_cache = {}
    frontier = deque([((), build_theta(A, ()))])
    explored = 0
    while frontier:
        events, prob = frontier.popleft()
        explored += 1
        res = engine.check_sat(prob.formula)
        if res.sat:
            w = word_from_model(A, events, res.model)
            return OracleResult(w, k, explored)
        if len(events) == k:
            continue
        for a in A.events:
            nxt = events + (a,)
            th = _step_theta(A, prob.rsets[-1], a, len(nxt))
            reach = L.conj(prob.reach, th)
            if not engine.is_sat(reach):
                continue
            n = len(nxt)
            acc = acc_cache.get(n)
            if acc is None:
                acc = acc_cache[n] = L.conj(*(L.Not(L.bvar(q.at(n))) for q in A.nonfinal))
            rs = frozenset(q for q in th.fv_bool if q.stamp == n)
            frontier.append((nxt, UnfoldingProblem(nxt, prob.thetas[:-1] + [th, acc],
                                                   prob.rsets + [rs])))
    return OracleResult(None, k, explored)


def length_lex_key(A: Automaton):
    order = {a: i for i, a in enumerate(A.events)}
    return lambda u: (len(u), tuple(order[a] for a in u))
