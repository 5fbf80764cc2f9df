"""Formulae of the combined Boolean + linear rational arithmetic theory.

Formula nodes are immutable and hash-consed: building the same node twice
returns the same object, so identity comparison is structural equality and
the hash, free variables and size are computed once per node.

Two families of constructors exist.  ``And``/``Or``/``Not`` build nodes as
given (only flattening nested connectives of the same kind and cancelling
double negation), which keeps sizes and structure predictable for the
boolean closure operations.  ``conj``/``disj``/``neg`` additionally fold
constants and drop duplicates; they are what the search procedures use.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union


class LogicError(ValueError):
    """Base class for ill-formed formula operations."""


class SortError(LogicError):
    pass


class UnboundVariableError(LogicError):
    pass


class NotPositiveError(LogicError):
    pass


class Sort(enum.Enum):
    BOOL = "Bool"
    DATA = "Data"


@dataclass(frozen=True, eq=False)
class Var:
    """A sorted variable, optionally time-stamped or marked as previous value."""

    name: str
    sort: Sort
    stamp: int | None = None
    prev: bool = False

    def __post_init__(self):
        if self.stamp is not None and (self.prev or self.stamp < 0):
            raise LogicError(f"bad decoration on variable {self.name}")
        if self.prev and self.sort is not Sort.DATA:
            raise SortError("only data variables have previous values")
        object.__setattr__(self, "_h", hash((self.name, self.stamp, self.prev, self.sort is Sort.BOOL)))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Var):
            return NotImplemented
        return (self._h == other._h and self.name == other.name and self.stamp == other.stamp
                and self.prev == other.prev and self.sort is other.sort)

    @property
    def key(self):
        return (self.name, -1 if self.stamp is None else self.stamp, self.prev, self.sort.value)

    def __lt__(self, other: "Var") -> bool:
        return self.key < other.key

    @property
    def is_bool(self) -> bool:
        return self.sort is Sort.BOOL

    def at(self, k: int) -> "Var":
        return Var(self.name, self.sort, k)

    def previous(self) -> "Var":
        return Var(self.name, self.sort, None, True)

    def base(self) -> "Var":
        return Var(self.name, self.sort)

    def __str__(self):
        if self.prev:
            return f"(pre {self.name})"
        if self.stamp is not None:
            return f"{self.name}@{self.stamp}"
        return self.name

    __repr__ = __str__


def state(name: str) -> Var:
    return Var(name, Sort.BOOL)


def data(name: str) -> Var:
    return Var(name, Sort.DATA)


_fresh_counter = itertools.count()
_fresh_lock = threading.Lock()


def fresh(v: Var) -> Var:
    """A variable of the same sort whose name cannot clash with user names."""
    with _fresh_lock:
        n = next(_fresh_counter)
    base = v.name.split("!")[0]
    return Var(f"{base}!{n}", v.sort)


Number = Union[int, Fraction]


@dataclass(frozen=True)
class Term:
    """Linear combination ``sum(c * v) + const`` over data variables."""

    coeffs: tuple[tuple[Var, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def of(x: "TermLike") -> "Term":
        if isinstance(x, Term):
            return x
        if isinstance(x, Var):
            if x.sort is not Sort.DATA:
                raise SortError(f"{x} is not a data variable")
            return Term(((x, Fraction(1)),))
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return Term((), Fraction(x))
        raise SortError(f"cannot make a term from {x!r}")

    @staticmethod
    def from_dict(d: Mapping[Var, Fraction], const: Number = 0) -> "Term":
        return Term(tuple(sorted(((v, Fraction(c)) for v, c in d.items() if c != 0),
                                 key=lambda p: p[0].key)), Fraction(const))

    def as_dict(self) -> dict[Var, Fraction]:
        return dict(self.coeffs)

    @property
    def vars(self) -> frozenset[Var]:
        return frozenset(v for v, _ in self.coeffs)

    def __add__(self, other: "TermLike") -> "Term":
        o = Term.of(other)
        d = self.as_dict()
        for v, c in o.coeffs:
            d[v] = d.get(v, 0) + c
        return Term.from_dict(d, self.const + o.const)

    __radd__ = __add__

    def __neg__(self) -> "Term":
        return Term(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "TermLike") -> "Term":
        return self + (-Term.of(other))

    def __rsub__(self, other: "TermLike") -> "Term":
        return Term.of(other) - self

    def __mul__(self, k: Number) -> "Term":
        if not isinstance(k, (int, Fraction)) or isinstance(k, bool):
            raise LogicError("only scalar multiplication is linear")
        k = Fraction(k)
        if k == 0:
            return Term()
        return Term(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    __rmul__ = __mul__

    def evaluate(self, nu: Mapping[Var, object]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            if v not in nu:
                raise UnboundVariableError(f"no value for {v}")
            total += c * Fraction(nu[v])
        return total

    def substitute(self, mapping: Mapping[Var, "Term"]) -> "Term":
        out = Term((), self.const)
        for v, c in self.coeffs:
            out = out + (mapping[v] if v in mapping else Term.of(v)) * c
        return out

    def __str__(self):
        from .sexpr import print_term
        return print_term(self)


TermLike = Union[Term, Var, int, Fraction]

# ---------------------------------------------------------------------------
# Formula nodes

TRUE_K, FALSE_K, VAR_K, ATOM_K, NOT_K, AND_K, OR_K, EXISTS_K = range(8)

OPS = ("=", "<=", "<", ">=", ">")
_FLIP = {"=": "=", "<=": ">=", "<": ">", ">=": "<=", ">": "<"}


class Formula:
    """Hash-consed formula node.  Never instantiate directly."""

    __slots__ = ("kind", "args", "_hash", "_fv", "_size", "__weakref__")

    def __init__(self, kind, args, h):
        self.kind = kind
        self.args = args
        self._hash = h
        self._fv = None
        self._size = None

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (_rebuild, (self.kind, self.args))

    # structural views -------------------------------------------------
    @property
    def children(self) -> tuple["Formula", ...]:
        if self.kind in (AND_K, OR_K):
            return self.args
        if self.kind == NOT_K:
            return (self.args[0],)
        if self.kind == EXISTS_K:
            return (self.args[1],)
        return ()

    @property
    def var(self) -> Var:
        assert self.kind == VAR_K
        return self.args[0]

    @property
    def op(self) -> str:
        assert self.kind == ATOM_K
        return self.args[0]

    @property
    def term(self) -> Term:
        assert self.kind == ATOM_K
        return Term(self.args[1])

    @property
    def rhs(self) -> Fraction:
        assert self.kind == ATOM_K
        return self.args[2]

    @property
    def bound(self) -> frozenset[Var]:
        assert self.kind == EXISTS_K
        return self.args[0]

    @property
    def body(self) -> "Formula":
        return self.args[1] if self.kind == EXISTS_K else self.args[0]

    def is_const(self) -> bool:
        return self.kind in (TRUE_K, FALSE_K)

    def is_literal(self) -> bool:
        return self.kind in (VAR_K, ATOM_K) or (
            self.kind == NOT_K and self.args[0].kind in (VAR_K, ATOM_K))

    @property
    def fv(self) -> frozenset[Var]:
        if self._fv is None:
            k = self.kind
            if k == VAR_K:
                r = frozenset(self.args)
            elif k == ATOM_K:
                r = frozenset(v for v, _ in self.args[1])
            elif k == EXISTS_K:
                r = self.args[1].fv - self.args[0]
            elif k in (TRUE_K, FALSE_K):
                r = frozenset()
            else:
                r = frozenset().union(*(c.fv for c in self.children))
            self._fv = r
        return self._fv

    @property
    def fv_bool(self) -> frozenset[Var]:
        return frozenset(v for v in self.fv if v.sort is Sort.BOOL)

    @property
    def fv_data(self) -> frozenset[Var]:
        return frozenset(v for v in self.fv if v.sort is Sort.DATA)

    @property
    def size(self) -> int:
        """Number of symbols; a negated atom counts as one literal."""
        if self._size is None:
            k = self.kind
            if k in (TRUE_K, FALSE_K, VAR_K, ATOM_K):
                s = 1
            elif k == NOT_K:
                s = 1 if self.is_literal() else 1 + self.args[0].size
            elif k in (AND_K, OR_K):
                s = sum(c.size for c in self.args) + len(self.args) - 1
            else:
                s = 1 + self.args[1].size
            self._size = s
        return self._size

    # operator sugar, simplifying --------------------------------------
    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    def __str__(self):
        from .sexpr import print_formula
        return print_formula(self)

    def __repr__(self):
        return f"<{self}>"


_table: dict = {}
_table_lock = threading.Lock()


def _intern(kind, args) -> Formula:
    key = (kind, args)
    f = _table.get(key)
    if f is None:
        with _table_lock:
            f = _table.get(key)
            if f is None:
                f = Formula(kind, args, hash(key))
                _table[key] = f
    return f


def _rebuild(kind, args):
    return _intern(kind, args)


TRUE = _intern(TRUE_K, ())
FALSE = _intern(FALSE_K, ())


def const(b: bool) -> Formula:
    return TRUE if b else FALSE


def bvar(v: Var) -> Formula:
    if v.sort is not Sort.BOOL:
        raise SortError(f"{v} is not a boolean variable")
    return _intern(VAR_K, (v,))


def _cmp_const(op: str, a: Fraction, b: Fraction) -> bool:
    if op == "=":
        return a == b
    if op == "<=":
        return a <= b
    if op == "<":
        return a < b
    if op == ">=":
        return a >= b
    return a > b


def compare(lhs: TermLike, op: str, rhs: TermLike = 0) -> Formula:
    """Atom ``lhs op rhs`` normalised to ``t op c`` with leading coefficient 1."""
    if op == "==":
        op = "="
    if op not in OPS:
        raise LogicError(f"unknown relation {op}")
    t = Term.of(lhs) - Term.of(rhs)
    c = -t.const
    if not t.coeffs:
        return const(_cmp_const(op, Fraction(0), c))
    lead = t.coeffs[0][1]
    if lead < 0:
        op = _FLIP[op]
    coeffs = tuple((v, k / lead) for v, k in t.coeffs)
    return _intern(ATOM_K, (op, coeffs, c / lead))


def eq(a, b=0):
    return compare(a, "=", b)


def le(a, b=0):
    return compare(a, "<=", b)


def lt(a, b=0):
    return compare(a, "<", b)


def ge(a, b=0):
    return compare(a, ">=", b)


def gt(a, b=0):
    return compare(a, ">", b)


def Not(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if f.kind == NOT_K:
        return f.args[0]
    return _intern(NOT_K, (f,))


def _flat(kind, fs):
    out = []
    for f in fs:
        if f.kind == kind:
            out.extend(f.args)
        else:
            out.append(f)
    return tuple(out)


def And(*fs: Formula) -> Formula:
    args = _flat(AND_K, fs)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return _intern(AND_K, args)


def Or(*fs: Formula) -> Formula:
    args = _flat(OR_K, fs)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return _intern(OR_K, args)


def _simplified(kind, fs, unit, zero):
    seen = set()
    out = []
    for f in _flat(kind, fs):
        if f is zero:
            return zero
        if f is unit or f in seen:
            continue
        seen.add(f)
        out.append(f)
    for f in out:
        if f.kind == NOT_K and f.args[0] in seen:
            return zero
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return _intern(kind, tuple(out))


def conj(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _simplified(AND_K, fs, TRUE, FALSE)


def disj(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _simplified(OR_K, fs, FALSE, TRUE)


def neg(f: Formula) -> Formula:
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(Not(a), b)


def Exists(vs: Iterable[Var], body: Formula) -> Formula:
    bound = frozenset(vs) & body.fv
    if not bound:
        return body
    if body.kind == EXISTS_K:
        return _intern(EXISTS_K, (bound | body.args[0], body.args[1]))
    return _intern(EXISTS_K, (bound, body))


def conjuncts(f: Formula) -> tuple[Formula, ...]:
    if f is TRUE:
        return ()
    return f.args if f.kind == AND_K else (f,)


# ---------------------------------------------------------------------------
# Traversals


def _memo_map(f: Formula, fn) -> Formula:
    """Bottom-up rebuild; ``fn(node, rebuilt_children)`` returns the new node."""
    memo: dict[int, Formula] = {}

    def go(g):
        r = memo.get(id(g))
        if r is None:
            r = fn(g, tuple(go(c) for c in g.children))
            memo[id(g)] = r
        return r

    return go(f)


Replacement = Union[Formula, TermLike]


def substitute(f: Formula, sigma: Mapping[Var, Replacement], simplify: bool = False) -> Formula:
    """Simultaneous, capture-avoiding replacement of free variables.

    Boolean variables must map to formulae, data variables to terms.  With
    ``simplify`` the result is rebuilt through the constant-folding
    constructors.
    """
    bmap: dict[Var, Formula] = {}
    dmap: dict[Var, Term] = {}
    for v, r in sigma.items():
        if v.sort is Sort.BOOL:
            if not isinstance(r, Formula):
                if isinstance(r, bool):
                    r = const(r)
                else:
                    raise SortError(f"boolean variable {v} replaced by non-formula {r!r}")
            bmap[v] = r
        else:
            if isinstance(r, Formula):
                raise SortError(f"data variable {v} replaced by a formula")
            dmap[v] = Term.of(r)
    return _subst(f, bmap, dmap, simplify)


def _subst(f, bmap, dmap, simplify):
    if not bmap and not dmap:
        return f
    mk_and, mk_or = (conj, disj) if simplify else (And, Or)
    memo: dict[int, Formula] = {}
    dom = set(bmap) | set(dmap)

    def go(g):
        if not (g.fv & dom):
            return g
        r = memo.get(id(g))
        if r is not None:
            return r
        k = g.kind
        if k == VAR_K:
            r = bmap.get(g.args[0], g)
        elif k == ATOM_K:
            t = Term(g.args[1]).substitute(dmap)
            r = compare(t, g.args[0], g.args[2])
        elif k == NOT_K:
            r = Not(go(g.args[0]))
        elif k == AND_K:
            r = mk_and(*(go(c) for c in g.args))
        elif k == OR_K:
            r = mk_or(*(go(c) for c in g.args))
        else:
            r = _subst_exists(g, bmap, dmap, simplify)
        memo[id(g)] = r
        return r

    return go(f)


def _subst_exists(g, bmap, dmap, simplify):
    bound, body = g.args
    bm = {v: r for v, r in bmap.items() if v not in bound and v in body.fv}
    dm = {v: r for v, r in dmap.items() if v not in bound and v in body.fv}
    incoming: set[Var] = set()
    for r in bm.values():
        incoming |= r.fv
    for r in dm.values():
        incoming |= r.vars
    clash = bound & incoming
    if clash:
        ren = {v: fresh(v) for v in clash}
        body = rename(body, ren)
        bound = (bound - clash) | frozenset(ren.values())
    return Exists(bound, _subst(body, bm, dm, simplify))


def rename(f: Formula, mapping: Mapping[Var, Var]) -> Formula:
    sigma: dict[Var, Replacement] = {}
    for v, w in mapping.items():
        if v.sort is not w.sort:
            raise SortError(f"cannot rename {v} to {w}")
        sigma[v] = bvar(w) if v.sort is Sort.BOOL else w
    return substitute(f, sigma)


def simplify(f: Formula) -> Formula:
    """Constant folding and duplicate removal."""

    def fn(g, ch):
        k = g.kind
        if k == NOT_K:
            return Not(ch[0])
        if k == AND_K:
            return conj(*ch)
        if k == OR_K:
            return disj(*ch)
        if k == EXISTS_K:
            return Exists(g.args[0], ch[0])
        return g

    return _memo_map(f, fn)


def evaluate_ground(f: Formula, nu: Mapping[Var, object]) -> bool:
    """Truth value of a quantifier-free formula under a total valuation."""
    memo: dict[int, bool] = {}

    def go(g):
        r = memo.get(id(g))
        if r is not None:
            return r
        k = g.kind
        if k == TRUE_K:
            r = True
        elif k == FALSE_K:
            r = False
        elif k == VAR_K:
            v = g.args[0]
            if v not in nu:
                raise UnboundVariableError(f"no value for {v}")
            r = bool(nu[v])
        elif k == ATOM_K:
            r = _cmp_const(g.args[0], Term(g.args[1]).evaluate(nu), g.args[2])
        elif k == NOT_K:
            r = not go(g.args[0])
        elif k == AND_K:
            r = all(go(c) for c in g.args)
        elif k == OR_K:
            r = any(go(c) for c in g.args)
        else:
            raise LogicError("evaluate_ground needs a quantifier-free formula")
        memo[id(g)] = r
        return r

    return go(f)


def negative_occurrence(f: Formula) -> list[str] | None:
    """Path to a boolean variable under an odd number of negations, or None."""
    seen: set[tuple[int, bool]] = set()

    def go(g, negated, path):
        if (id(g), negated) in seen or not g.fv_bool:
            return None
        seen.add((id(g), negated))
        k = g.kind
        if k == VAR_K:
            return path + [str(g.args[0])] if negated else None
        if k == NOT_K:
            return go(g.args[0], not negated, path + ["not"])
        if k in (AND_K, OR_K):
            name = "and" if k == AND_K else "or"
            for i, c in enumerate(g.args):
                r = go(c, negated, path + [f"{name}[{i}]"])
                if r is not None:
                    return r
            return None
        if k == EXISTS_K:
            return go(g.args[1], negated, path + ["exists"])
        return None

    return go(f, False, [])


def is_positive(f: Formula) -> bool:
    """Membership in Form+: every boolean variable occurs under even negations."""
    return negative_occurrence(f) is None


def dualize(f: Formula) -> Formula:
    """Swap and/or, negate non-state atoms, keep state variables.

    The result has the same size, and dualizing twice gives back ``f``.
    """
    path = negative_occurrence(f)
    if path is not None:
        raise NotPositiveError("state under odd negations: " + " / ".join(path))

    def fn(g, ch):
        k = g.kind
        if k == TRUE_K:
            return FALSE
        if k == FALSE_K:
            return TRUE
        if k == VAR_K:
            return g
        if k == ATOM_K:
            return Not(g)
        if k == NOT_K:
            return Not(ch[0])
        if k == AND_K:
            return Or(*ch)
        if k == OR_K:
            return And(*ch)
        raise LogicError("cannot dualize an existential formula")

    return _memo_map(f, fn)


Delta = Union[Callable[[Var, str], Formula], Mapping[tuple[Var, str], Formula]]


def _lookup(delta: Delta, q: Var, a: str) -> Formula:
    if callable(delta):
        return delta(q, a)
    return delta.get((q, a), FALSE)


def time_stamp(f: Formula, prev_stamp: int | None, cur_stamp: int | None,
               states: int | None | bool = False) -> Formula:
    """Stamp previous-value data variables with ``prev_stamp`` and current ones
    with ``cur_stamp``.  Unstamped states get ``states`` unless it is False."""
    sigma: dict[Var, Replacement] = {}
    for v in f.fv:
        if v.stamp is not None:
            continue
        if v.sort is Sort.DATA:
            k = prev_stamp if v.prev else cur_stamp
            if k is not None:
                sigma[v] = Var(v.name, Sort.DATA, k)
        elif states is not False and states is not None:
            sigma[v] = bvar(v.at(states))
    return substitute(f, sigma)


def unstamp(f: Formula, k: int) -> Formula:
    """Drop stamp ``k`` from every variable carrying it."""
    sigma: dict[Var, Replacement] = {}
    for v in f.fv:
        if v.stamp == k:
            sigma[v] = bvar(v.base()) if v.sort is Sort.BOOL else v.base()
    return substitute(f, sigma)


def stamp_all(f: Formula, k: int) -> Formula:
    """Stamp every unstamped current variable (states and data) with ``k``."""
    return time_stamp(f, None, k, states=k)


def rewrite_step(phi: Formula, event: str, delta: Delta, k: int) -> Formula:
    """Replace each state q of ``phi`` by Delta(q, event) stamped for step k."""
    sigma = {}
    for q in phi.fv_bool:
        if q.stamp is None:
            sigma[q] = time_stamp(_lookup(delta, q, event), k, k + 1)
    return substitute(phi, sigma)
