"""CDCL(T) for quantifier-free Boolean + linear rational arithmetic.

Formulae are clausified per partition (polarity-aware definitional
encoding, with auxiliary variables private to their partition) so that the
resolution proof recorded during search can later be split into
interpolants along any partition boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import logic as L
from ..logic import Formula, Var
from .simplex import Simplex


class SolverBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundAtom:
    """``term <= rhs`` (or ``<`` when strict); term has leading coefficient 1."""

    coeffs: tuple[tuple[Var, Fraction], ...]
    rhs: Fraction
    strict: bool

    def constraint(self, positive: bool):
        """The literal as ``(coeffs, rhs, strict)`` in less-than form."""
        if positive:
            return dict(self.coeffs), self.rhs, self.strict
        return {v: -c for v, c in self.coeffs}, -self.rhs, not self.strict

    def formula(self, positive: bool) -> Formula:
        t = L.Term(self.coeffs)
        if positive:
            return L.compare(t, "<" if self.strict else "<=", self.rhs)
        return L.compare(t, ">=" if self.strict else ">", self.rhs)


@dataclass
class Clause:
    lits: list[int]
    kind: str  # "input", "lemma", "learned"
    part: int = -1
    farkas: dict[int, Fraction] | None = None
    chain: list | None = None  # [first_clause, (pivot_var, clause), ...]


@dataclass
class Proof:
    clauses: list[Clause]
    empty: Clause
    atoms: list  # index -> Var (boolean) or BoundAtom
    occurs: list[set[int]]  # var index -> partitions with an input clause using it
    nparts: int


class Encoder:
    """Clausification into a shared atom table."""

    def __init__(self):
        self.atoms: list = [None]  # 1-based
        self.index: dict = {}
        self.aux_owner: dict[int, int] = {}
        self.clauses: list[tuple[list[int], int]] = []
        self._memo: dict = {}

    def var_for(self, key) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.atoms)
            self.atoms.append(key)
            self.index[key] = i
        return i

    def _aux(self, part: int) -> int:
        i = len(self.atoms)
        self.atoms.append(("aux", i))
        self.aux_owner[i] = part
        return i

    def _bound_lits(self, g: Formula, pos: bool):
        """Atom (possibly negated) as a conjunction/disjunction of bound literals."""
        coeffs, c, op = g.args[1], g.args[2], g.args[0]
        if op in ("<=", ">"):
            ns = self.var_for(BoundAtom(coeffs, c, False))
            return ("lit", ns if (op == "<=") == pos else -ns)
        st = self.var_for(BoundAtom(coeffs, c, True))
        if op in ("<", ">="):
            return ("lit", st if (op == "<") == pos else -st)
        ns = self.var_for(BoundAtom(coeffs, c, False))
        # equality: t <= c and not t < c
        return ("and" if pos else "or", [ns, -st] if pos else [-ns, st])

    def literal(self, g: Formula, pos: bool, part: int) -> int | None:
        """Literal implying (g if pos else not g); None means constant true."""
        k = g.kind
        if k == L.NOT_K:
            return self.literal(g.args[0], not pos, part)
        if k == L.VAR_K:
            i = self.var_for(g.var)
            return i if pos else -i
        if k in (L.TRUE_K, L.FALSE_K):
            raise AssertionError("constants are folded before encoding")
        key = (id(g), pos, part)
        if key in self._memo:
            return self._memo[key]
        if k == L.ATOM_K:
            shape, lits = self._bound_lits(g, pos)
            if shape == "lit":
                self._memo[key] = lits
                return lits
            conj = shape == "and"
            kids = lits
        else:
            conj = (k == L.AND_K) == pos
            kids = [self.literal(c, pos, part) for c in g.args]
        t = self._aux(part)
        if conj:
            for x in kids:
                self.clauses.append(([-t, x], part))
        else:
            self.clauses.append(([-t] + kids, part))
        self._memo[key] = t
        return t

    def add_formula(self, f: Formula, part: int) -> None:
        f = L.simplify(f)
        if f is L.TRUE:
            return
        if f is L.FALSE:
            self.clauses.append(([], part))
            return
        for c in L.conjuncts(f):
            if c.kind == L.OR_K:
                self.clauses.append(([self.literal(d, True, part) for d in c.args], part))
            else:
                self.clauses.append(([self.literal(c, True, part)], part))


class CDCL:
    """Conflict-driven clause learning with an arithmetic theory and proofs."""

    def __init__(self, enc: Encoder, nparts: int, max_conflicts: int = 200000):
        self.enc = enc
        self.nparts = nparts
        self.max_conflicts = max_conflicts
        n = len(enc.atoms)
        self.nvars = n - 1
        self.value = [0] * n
        self.level = [0] * n
        self.reason: list[Clause | None] = [None] * n
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.watches: dict[int, list[Clause]] = {}
        self.clauses: list[Clause] = []
        self.activity = [0.0] * n
        self.phase = [False] * n
        self.bump = 1.0
        self.conflicts = 0
        self.qhead = 0
        self.thead = 0
        self.empty: Clause | None = None
        self.occurs: list[set[int]] = [set() for _ in range(n)]
        self.pending_conflict: Clause | None = None
        # theory
        self.simplex = Simplex()
        self.sx_var: dict[Var, int] = {}
        self.atom_sx: dict[int, int] = {}
        self._th_marks: list[int] = []
        for i in range(1, n):
            a = enc.atoms[i]
            if isinstance(a, BoundAtom):
                self.atom_sx[i] = self._sx_for(a.coeffs)
        for lits, part in enc.clauses:
            for x in lits:
                self.occurs[abs(x)].add(part)
            self._add_input(list(dict.fromkeys(lits)), part)
        # atoms no clause mentions are never decided, so they stay out of lemmas
        self.order = sorted((i for i in range(1, n) if self.occurs[i]), key=self._order_key)

    def _order_key(self, i):
        a = self.enc.atoms[i]
        if isinstance(a, Var):
            return (0, a.key)
        if isinstance(a, BoundAtom):
            return (1, tuple((v.key, c) for v, c in a.coeffs), a.rhs, a.strict)
        return (2, i)

    def _sx_for(self, coeffs) -> int:
        cols = {}
        for v, _ in coeffs:
            if v not in self.sx_var:
                self.sx_var[v] = self.simplex.new_var()
            cols[self.sx_var[v]] = None
        if len(coeffs) == 1:
            return self.sx_var[coeffs[0][0]]
        key = ("row", coeffs)
        if key not in self.sx_var:
            self.sx_var[key] = self.simplex.add_row({self.sx_var[v]: c for v, c in coeffs})
        return self.sx_var[key]

    # clause management --------------------------------------------------
    def _lit_val(self, x: int) -> int:
        v = self.value[abs(x)]
        return v if x > 0 else -v

    def _add_input(self, lits: list[int], part: int) -> None:
        if any(-x in lits for x in lits):
            return  # tautology, never needed in a refutation
        c = Clause(lits, "input", part)
        self.clauses.append(c)
        if not lits:
            self.empty = c
            return
        if len(lits) == 1:
            self._unit_input(c)
            return
        self._watch(c)

    def _unit_input(self, c: Clause) -> None:
        x = c.lits[0]
        val = self._lit_val(x)
        if val == 1:
            # keep a record so the clause can serve as reason later if needed
            self.watches.setdefault(-x, []).append(c)
            return
        if val == -1:
            self.pending_conflict = c
            return
        self._assign(x, c)
        self.watches.setdefault(-x, []).append(c)

    def _watch(self, c: Clause) -> None:
        self.watches.setdefault(-c.lits[0], []).append(c)
        self.watches.setdefault(-c.lits[1], []).append(c)

    def _assign(self, x: int, reason: Clause | None) -> None:
        v = abs(x)
        self.value[v] = 1 if x > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(x)

    def _propagate(self) -> Clause | None:
        while self.qhead < len(self.trail):
            x = self.trail[self.qhead]
            self.qhead += 1
            ws = self.watches.get(x)
            if not ws:
                continue
            keep = []
            conflict = None
            i = 0
            while i < len(ws):
                c = ws[i]
                i += 1
                lits = c.lits
                if len(lits) == 1:
                    keep.append(c)
                    if self._lit_val(lits[0]) == -1:
                        conflict = c
                        keep.extend(ws[i:])
                        break
                    continue
                if lits[0] == -x:
                    lits[0], lits[1] = lits[1], lits[0]
                if self._lit_val(lits[0]) == 1:
                    keep.append(c)
                    continue
                found = False
                for k in range(2, len(lits)):
                    if self._lit_val(lits[k]) != -1:
                        lits[1], lits[k] = lits[k], lits[1]
                        self.watches.setdefault(-lits[1], []).append(c)
                        found = True
                        break
                if found:
                    continue
                keep.append(c)
                if self._lit_val(lits[0]) == -1:
                    conflict = c
                    keep.extend(ws[i:])
                    break
                self._assign(lits[0], c)
            self.watches[x] = keep
            if conflict is not None:
                return conflict
        return None

    # theory -------------------------------------------------------------
    def _theory(self) -> Clause | None:
        sx = self.simplex
        while self.thead < len(self.trail):
            x = self.trail[self.thead]
            self.thead += 1
            v = abs(x)
            a = self.enc.atoms[v]
            if not isinstance(a, BoundAtom):
                continue
            j = self.atom_sx[v]
            if x > 0:
                bound = (a.rhs, Fraction(-1) if a.strict else Fraction(0))
                conf = sx.assert_upper(j, bound, x)
            else:
                bound = (a.rhs, Fraction(0) if a.strict else Fraction(1))
                conf = sx.assert_lower(j, bound, x)
            if conf is not None:
                return self._lemma(conf)
        conf = sx.check()
        if conf is not None:
            return self._lemma(conf)
        return None

    def _lemma(self, conf) -> Clause:
        farkas: dict[int, Fraction] = {}
        for lit, k in conf:
            farkas[lit] = farkas.get(lit, 0) + k
        c = Clause([-x for x in farkas], "lemma", farkas=farkas)
        self.clauses.append(c)
        return c

    # search -------------------------------------------------------------
    def _decide_var(self) -> int | None:
        best = None
        for v in self.order:
            if self.value[v] == 0 and (best is None or self.activity[v] > self.activity[best]):
                best = v
        return best

    def _backjump(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        for x in self.trail[lim:]:
            v = abs(x)
            self.phase[v] = x > 0
            self.value[v] = 0
            self.reason[v] = None
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.simplex.undo(self._th_marks[lvl])
        del self._th_marks[lvl:]
        self.qhead = min(self.qhead, lim)
        self.thead = min(self.thead, lim)

    def _analyze(self, confl: Clause):
        cur = len(self.trail_lim)
        seen: set[int] = set()
        lits: dict[int, int] = {}
        count = 0
        for x in confl.lits:
            v = abs(x)
            lits[v] = x
            if self.level[v] == cur and cur > 0:
                count += 1
        chain: list = [confl]
        for x in reversed(self.trail):
            v = abs(x)
            if v not in lits or v in seen:
                continue
            lv = self.level[v]
            if lv == cur and cur > 0:
                if count == 1:
                    continue  # the UIP stays
                count -= 1
            elif lv != 0:
                continue
            seen.add(v)
            r = self.reason[v]
            del lits[v]
            chain.append((v, r))
            for y in r.lits:
                w = abs(y)
                if w == v or w in lits:
                    continue
                lits[w] = y
                if self.level[w] == cur and cur > 0:
                    count += 1
        learned = Clause(list(lits.values()), "learned", chain=chain)
        self.clauses.append(learned)
        for v, _ in chain[1:]:
            self.activity[v] += self.bump
        for v in lits:
            self.activity[v] += self.bump
        self.bump *= 1.05
        return learned

    def solve(self) -> bool:
        if self.empty is not None:
            return False
        while True:
            confl = self.pending_conflict
            self.pending_conflict = None
            if confl is None:
                confl = self._propagate()
            if confl is None:
                confl = self._theory()
                if confl is None and self.qhead < len(self.trail):
                    continue
            if confl is not None:
                self.conflicts += 1
                if self.conflicts > self.max_conflicts:
                    raise SolverBudgetExceeded(f"{self.conflicts} conflicts")
                learned = self._analyze(confl)
                if not learned.lits:
                    self.empty = learned
                    return False
                cur = len(self.trail_lim)
                uip = next(x for x in learned.lits if self.level[abs(x)] == cur)
                others = [x for x in learned.lits if x != uip]
                back = max((self.level[abs(x)] for x in others), default=0)
                self._backjump(back)
                if others:
                    hi = max(others, key=lambda x: self.level[abs(x)])
                    rest = [x for x in others if x != hi]
                    learned.lits[:] = [uip, hi] + rest
                    self._watch(learned)
                else:
                    self.watches.setdefault(-uip, []).append(learned)
                self._assign(uip, learned)
                continue
            v = self._decide_var()
            if v is None:
                return True
            self.trail_lim.append(len(self.trail))
            self._th_marks.append(self.simplex.mark())
            self._assign(v if self.phase[v] else -v, None)

    # results ------------------------------------------------------------
    def model(self, wanted: Sequence[Var]) -> dict[Var, object]:
        vals = self.simplex.concrete_values()
        out: dict[Var, object] = {}
        for w in wanted:
            if w.sort is L.Sort.BOOL:
                i = self.enc.index.get(w)
                out[w] = bool(i is not None and self.value[i] == 1)
            else:
                j = self.sx_var.get(w)
                out[w] = vals[j] if j is not None else Fraction(0)
        return out

    def proof(self) -> Proof:
        assert self.empty is not None
        return Proof(self.clauses, self.empty, self.enc.atoms, self.occurs, self.nparts)
