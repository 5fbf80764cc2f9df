"""Sequence interpolants from refutation proofs, plus an exact fallback.

For every cut ``i`` the proof is relabelled with A = partitions ``0..i`` and
B = the rest.  Input clauses from A contribute the disjunction of their
B-visible literals, input clauses from B contribute true, resolution on an
A-local pivot is a disjunction and on any other pivot a conjunction.
Theory lemmas contribute the Farkas combination of their A-local literals,
where an atom that also occurs in B counts as B.
"""
from __future__ import annotations

from fractions import Fraction

from .. import logic as L
from ..logic import Formula, Var
from .solver import BoundAtom, Clause, Proof


def _literal_formula(atoms, x: int) -> Formula:
    a = atoms[abs(x)]
    if isinstance(a, Var):
        f = L.bvar(a)
        return f if x > 0 else L.Not(f)
    if isinstance(a, BoundAtom):
        return a.formula(x > 0)
    raise AssertionError("auxiliary literal leaked into an interpolant")


def _farkas_sum(atoms, items) -> Formula:
    coeffs: dict[Var, Fraction] = {}
    rhs = Fraction(0)
    strict = False
    for x, k in items:
        a: BoundAtom = atoms[abs(x)]
        cs, c, st = a.constraint(x > 0)
        for v, e in cs.items():
            coeffs[v] = coeffs.get(v, 0) + k * e
        rhs += k * c
        strict = strict or st
    t = L.Term.from_dict(coeffs)
    return L.compare(t, "<" if strict else "<=", rhs)


def cut_interpolant(proof: Proof, cut: int) -> Formula:
    """Partial interpolant of the empty clause for A = partitions ``<= cut``."""
    occurs = proof.occurs
    atoms = proof.atoms

    def in_b(v: int) -> bool:
        return any(p > cut for p in occurs[v])

    memo: dict[int, Formula] = {}
    # iterative post-order to avoid deep recursion on long proofs
    stack: list[tuple[Clause, bool]] = [(proof.empty, False)]
    while stack:
        c, ready = stack.pop()
        if id(c) in memo:
            continue
        if c.kind == "input":
            if c.part <= cut:
                memo[id(c)] = L.disj(*(_literal_formula(atoms, x) for x in c.lits if in_b(abs(x))))
            else:
                memo[id(c)] = L.TRUE
            continue
        if c.kind == "lemma":
            a_items = [(x, k) for x, k in c.farkas.items() if not in_b(abs(x))]
            memo[id(c)] = _farkas_sum(atoms, a_items) if a_items else L.TRUE
            continue
        deps = [c.chain[0]] + [r for _, r in c.chain[1:]]
        if not ready:
            stack.append((c, True))
            stack.extend((d, False) for d in deps if id(d) not in memo)
            continue
        cur = memo[id(c.chain[0])]
        for v, r in c.chain[1:]:
            other = memo[id(r)]
            cur = L.conj(cur, other) if in_b(v) else L.disj(cur, other)
        memo[id(c)] = cur
    return memo[id(proof.empty)]


def proof_interpolants(proof: Proof) -> list[Formula]:
    """``[I_0, ..., I_{n-2}]`` for a proof over ``n`` partitions."""
    return [cut_interpolant(proof, i) for i in range(proof.nparts - 1)]
