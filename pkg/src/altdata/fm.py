"""Disjunctive normal form and Fourier-Motzkin elimination.

This is the slow, obviously-correct route: it serves as the independent
oracle for the solver and as the exact projection used by the fallback
interpolation strategy and by interpolant positivization.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from . import logic as L
from .logic import Formula, Sort, Var

# A linear constraint sum(coeffs) REL const, REL in {"<=", "<", "="}.
Constraint = tuple[tuple[tuple[Var, Fraction], ...], str, Fraction]


def _norm(coeffs: dict, rel: str, c: Fraction) -> Constraint:
    items = sorted(((v, k) for v, k in coeffs.items() if k != 0), key=lambda p: p[0].key)
    if items:
        s = abs(items[0][1])
        if rel == "=" and items[0][1] < 0:
            s = -s
        items = [(v, k / s) for v, k in items]
        c = c / s
    return (tuple(items), rel, Fraction(c))


def atom_constraints(a: Formula, positive: bool) -> list[list[Constraint]]:
    """Constraints of a (possibly negated) atom, as a disjunction of conjunctions."""
    t = a.term.as_dict()
    neg_t = {v: -k for v, k in t.items()}
    c = a.rhs
    op = a.op
    if not positive:
        if op == "=":
            return [[_norm(t, "<", c)], [_norm(neg_t, "<", -c)]]
        op = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}[op]
    if op == "=":
        return [[_norm(t, "=", c)]]
    if op == "<=":
        return [[_norm(t, "<=", c)]]
    if op == "<":
        return [[_norm(t, "<", c)]]
    if op == ">=":
        return [[_norm(neg_t, "<=", -c)]]
    return [[_norm(neg_t, "<", -c)]]


def strip_exists(f: Formula) -> Formula:
    """Replace positively-occurring existentials by fresh free variables."""

    def go(g, pos):
        k = g.kind
        if k == L.NOT_K:
            return L.Not(go(g.args[0], not pos))
        if k == L.AND_K:
            return L.And(*(go(c, pos) for c in g.args))
        if k == L.OR_K:
            return L.Or(*(go(c, pos) for c in g.args))
        if k == L.EXISTS_K:
            if not pos:
                raise L.LogicError("existential under negation")
            ren = {v: L.fresh(v) for v in g.bound}
            return go(L.rename(g.body, ren), pos)
        return g

    return go(f, True)


class Cube:
    """Conjunction of boolean literals and linear constraints."""

    __slots__ = ("bools", "cons")

    def __init__(self, bools: dict[Var, bool] | None = None, cons: tuple = ()):
        self.bools = bools or {}
        self.cons = cons

    def merge(self, other: "Cube") -> "Cube | None":
        b = dict(self.bools)
        for v, val in other.bools.items():
            if b.get(v, val) != val:
                return None
            b[v] = val
        cons = self.cons + tuple(c for c in other.cons if c not in self.cons)
        return Cube(b, cons)

    def to_formula(self) -> Formula:
        parts = [L.bvar(v) if val else L.Not(L.bvar(v))
                 for v, val in sorted(self.bools.items(), key=lambda p: p[0].key)]
        parts += [constraint_formula(c) for c in self.cons]
        return L.conj(*parts)


def constraint_formula(c: Constraint) -> Formula:
    coeffs, rel, k = c
    return L.compare(L.Term(coeffs), rel, k)


def dnf(f: Formula, limit: int | None = None) -> list[Cube]:
    """Cubes whose disjunction is equivalent to ``f`` (quantifier-free)."""
    memo: dict[tuple[int, bool], list[Cube]] = {}

    def go(g, pos) -> list[Cube]:
        key = (id(g), pos)
        if key in memo:
            return memo[key]
        k = g.kind
        if k == L.TRUE_K:
            r = [Cube()] if pos else []
        elif k == L.FALSE_K:
            r = [] if pos else [Cube()]
        elif k == L.VAR_K:
            r = [Cube({g.var: pos})]
        elif k == L.ATOM_K:
            r = [Cube(None, tuple(cs)) for cs in atom_constraints(g, pos)]
        elif k == L.NOT_K:
            r = go(g.args[0], not pos)
        elif (k == L.AND_K) == pos:
            r = [Cube()]
            for c in g.args:
                sub = go(c, pos)
                nxt = []
                for x in r:
                    for y in sub:
                        m = x.merge(y)
                        if m is not None:
                            nxt.append(m)
                r = nxt
                if limit is not None and len(r) > limit:
                    raise OverflowError("DNF too large")
                if not r:
                    break
        elif k in (L.AND_K, L.OR_K):
            r = []
            for c in g.args:
                r.extend(go(c, pos))
        else:
            raise L.LogicError("dnf needs a quantifier-free formula")
        memo[key] = r
        return r

    return go(f, True)


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _ground_ok(c: Constraint) -> bool:
    _, rel, k = c
    if rel == "=":
        return k == 0
    return k > 0 if rel == "<" else k >= 0


def _substitute_eq(cons: list[Constraint], v: Var, eqc: Constraint) -> list[Constraint] | None:
    coeffs, _, k = eqc
    d = dict(coeffs)
    a = d.pop(v)
    # v = (k - sum(d)) / a
    out = []
    for c in cons:
        cd = dict(c[0])
        b = cd.pop(v, None)
        if b is None:
            out.append(c)
            continue
        f = b / a
        for w, e in d.items():
            cd[w] = cd.get(w, 0) - f * e
        nc = _norm(cd, c[1], c[2] - f * k)
        if not nc[0]:
            if not _ground_ok(nc):
                return None
            continue
        out.append(nc)
    return out


def eliminate(cons: Iterable[Constraint], elim: set[Var]) -> list[Constraint] | None:
    """Project a conjunction onto the variables outside ``elim``.

    Returns None when the conjunction is infeasible (detected on the way).
    """
    work: list[Constraint] = []
    for c in cons:
        if not c[0]:
            if not _ground_ok(c):
                return None
            continue
        if c not in work:
            work.append(c)
    todo = set(elim)
    while True:
        present = {v for c in work for v, _ in c[0]} & todo
        if not present:
            break
        eqs = [c for c in work if c[1] == "=" and any(v in present for v, _ in c[0])]
        if eqs:
            e = eqs[0]
            v = next(v for v, _ in e[0] if v in present)
            rest = [c for c in work if c is not e]
            work = _substitute_eq(rest, v, e)
            if work is None:
                return None
            work = list(dict.fromkeys(work))
            continue

        pcount: dict[Var, int] = {}
        ncount: dict[Var, int] = {}
        for c in work:
            for w, a in c[0]:
                if w in present:
                    d = pcount if a > 0 else ncount
                    d[w] = d.get(w, 0) + 1

        def cost(v):
            p, n = pcount.get(v, 0), ncount.get(v, 0)
            return (p * n - p - n, v.key)

        v = min(present, key=cost)
        pos, negs, keep = [], [], []
        for c in work:
            a = dict(c[0]).get(v, 0)
            (pos if a > 0 else negs if a < 0 else keep).append(c)
        for p in pos:
            pd = dict(p[0])
            ap = pd[v]
            for n in negs:
                nd = dict(n[0])
                an = -nd[v]
                comb: dict[Var, Fraction] = {}
                for w, e in pd.items():
                    comb[w] = comb.get(w, 0) + e / ap
                for w, e in nd.items():
                    comb[w] = comb.get(w, 0) + e / an
                comb.pop(v, None)
                rel = "<" if "<" in (p[1], n[1]) else "<="
                nc = _norm(comb, rel, p[2] / ap + n[2] / an)
                if not nc[0]:
                    if not _ground_ok(nc):
                        return None
                    continue
                if nc not in keep:
                    keep.append(nc)
        work = keep
        todo.discard(v)
    return work


def cube_feasible(cube: Cube) -> bool:
    allv = {v for c in cube.cons for v, _ in c[0]}
    return eliminate(cube.cons, allv) is not None


def oracle_sat(f: Formula) -> bool:
    """Satisfiability by DNF expansion and Fourier-Motzkin elimination."""
    g = strip_exists(f)
    return any(cube_feasible(c) for c in dnf(g))


def project(f: Formula, keep: Iterable[Var], limit: int | None = 20000) -> Formula:
    """Quantifier-free formula equivalent to existentially quantifying
    every free variable of ``f`` outside ``keep``."""
    keep = set(keep)
    g = strip_exists(f)
    out: list[Formula] = []
    seen: set = set()
    cubes = []
    for cube in dnf(g, limit):
        allv = {v for c in cube.cons for v, _ in c[0]}
        if eliminate(cube.cons, allv) is None:
            continue
        cons = eliminate(cube.cons, allv - keep)
        bools = {v: b for v, b in cube.bools.items() if v in keep}
        key = (frozenset(bools.items()), frozenset(cons))
        if key in seen:
            continue
        seen.add(key)
        cubes.append((key, Cube(bools, tuple(cons))))
    # drop cubes syntactically subsumed by a weaker one
    for i, (ki, ci) in enumerate(cubes):
        if any(j != i and kj[0] <= ki[0] and kj[1] <= ki[1] and (kj != ki or j < i)
               for j, (kj, _) in enumerate(cubes)):
            continue
        out.append(ci.to_formula())
    return L.disj(*out)


def data_vars(f: Formula) -> set[Var]:
    return {v for v in f.fv if v.sort is Sort.DATA}


def iter_models(f: Formula) -> Iterator[Cube]:
    g = strip_exists(f)
    for c in dnf(g):
        if cube_feasible(c):
            yield c
