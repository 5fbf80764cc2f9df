"""Embedded interpolating solver for Boolean + linear rational arithmetic.

The usual entry point is an :class:`Engine`, which counts calls, caches
results and enforces a call budget.  Module-level helpers use a shared
default engine without a budget.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .. import fm
from .. import logic as L
from ..logic import Formula, Var
from .interpolate import proof_interpolants
from .solver import CDCL, Encoder, Proof, SolverBudgetExceeded

__all__ = [
    "BudgetExceeded", "Engine", "SatResult", "SatisfiableError", "check_sat", "entails",
    "interpolate_sequence", "check_interpolants", "shared_vars",
]


class BudgetExceeded(RuntimeError):
    """A resource budget ran out; the question stays undecided."""


class SatisfiableError(ValueError):
    """Interpolation was asked for a satisfiable sequence."""

    def __init__(self, model: dict):
        self.model = model
        shown = ", ".join(f"{v}={model[v]}" for v in sorted(model))
        super().__init__(f"sequence is satisfiable: {shown}")


@dataclass
class SatResult:
    status: str  # "sat", "unsat" or "unknown"
    model: dict[Var, object] | None = None
    proof: Proof | None = None

    @property
    def sat(self) -> bool:
        return self.status == "sat"

    @property
    def unsat(self) -> bool:
        return self.status == "unsat"


def _prepare(f: Formula) -> Formula:
    return L.simplify(fm.strip_exists(f))


def shared_vars(thetas: Sequence[Formula], cut: int) -> frozenset[Var]:
    left = frozenset().union(*(t.fv for t in thetas[:cut + 1]))
    right = frozenset().union(*(t.fv for t in thetas[cut + 1:]))
    return left & right


@dataclass
class Engine:
    max_calls: int | None = None
    max_conflicts: int = 200000
    calls: int = 0
    cache_hits: int = 0
    interpolations: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def _charge(self) -> None:
        self.calls += 1
        if self.max_calls is not None and self.calls > self.max_calls:
            raise BudgetExceeded(f"solver call budget {self.max_calls} exhausted")

    def _run(self, parts: Sequence[Formula]) -> tuple[CDCL, bool]:
        enc = Encoder()
        for i, p in enumerate(parts):
            enc.add_formula(p, i)
        s = CDCL(enc, len(parts), self.max_conflicts)
        try:
            return s, s.solve()
        except SolverBudgetExceeded as e:
            raise BudgetExceeded(str(e)) from None

    def check_sat(self, f: Formula) -> SatResult:
        hit = self._cache.get(f)
        if hit is not None:
            self.cache_hits += 1
            return hit
        self._charge()
        g = _prepare(f)
        if g is L.FALSE:
            res = SatResult("unsat")
        else:
            s, sat = self._run([g])
            if sat:
                res = SatResult("sat", s.model(sorted(g.fv)))
            else:
                res = SatResult("unsat", proof=s.proof())
        self._cache[f] = res
        return res

    def is_sat(self, f: Formula) -> bool:
        return self.check_sat(f).sat

    def entails(self, a: Formula, b: Formula) -> bool:
        """``a |= b``.  Existentials may occur positively in ``a`` only."""
        if a is L.FALSE or b is L.TRUE or a is b:
            return True
        if b.kind == L.EXISTS_K or any(c.kind == L.EXISTS_K for c in L.conjuncts(b)):
            raise L.LogicError("entails: existential on the right")
        return not self.is_sat(L.conj(a, L.neg(b)))

    def interpolate_sequence(self, thetas: Sequence[Formula], strategy: str = "proof") -> list[Formula]:
        """``[true, I_0, ..., I_{n-1}, false]`` for an unsatisfiable ``theta_0..theta_n``.

        The strategy is ``proof`` (labelled resolution proof) or ``exact``
        (strongest interpolants by quantifier elimination).
        """
        self._charge()
        self.interpolations += 1
        parts = [_prepare(t) for t in thetas]
        if strategy == "exact":
            itps = self._exact(parts)
        elif strategy == "proof":
            s, sat = self._run(parts)
            if sat:
                allv = sorted(frozenset().union(*(p.fv for p in parts)))
                raise SatisfiableError(s.model(allv))
            itps = [L.simplify(i) for i in proof_interpolants(s.proof())]
        else:
            raise ValueError(f"unknown interpolation strategy {strategy!r}")
        return [L.TRUE] + itps + [L.FALSE]

    def _exact(self, parts: list[Formula]) -> list[Formula]:
        out = []
        cur = L.TRUE
        for i in range(len(parts) - 1):
            keep = shared_vars(parts, i)
            cur = fm.project(L.conj(cur, parts[i]), keep)
            out.append(cur)
        if self.is_sat(L.conj(cur, parts[-1])):
            allv = sorted(frozenset().union(*(p.fv for p in parts)))
            raise SatisfiableError(self.check_sat(L.conj(*parts)).model or {v: 0 for v in allv})
        return out

    def check_interpolants(self, thetas: Sequence[Formula], itps: Sequence[Formula]) -> list[str]:
        """Violated interpolation conditions (empty when all hold)."""
        parts = [_prepare(t) for t in thetas]
        n = len(parts)
        problems = []
        if len(itps) != n + 1:
            return [f"expected {n + 1} formulae, got {len(itps)}"]
        if itps[0] is not L.TRUE or itps[-1] is not L.FALSE:
            problems.append("sequence must start with true and end with false")
        for i in range(n):
            if not self.entails(L.conj(itps[i], parts[i]), itps[i + 1]):
                problems.append(f"step {i} is not inductive")
        for i in range(n - 1):
            extra = itps[i + 1].fv - shared_vars(parts, i)
            if extra:
                problems.append(f"I_{i} mentions non-shared {sorted(extra)}")
        return problems


_default = Engine()


def check_sat(f: Formula) -> SatResult:
    return _default.check_sat(f)


def entails(a: Formula, b: Formula) -> bool:
    return _default.entails(a, b)


def interpolate_sequence(thetas: Sequence[Formula], strategy: str = "proof") -> list[Formula]:
    return _default.interpolate_sequence(thetas, strategy)


def check_interpolants(thetas: Sequence[Formula], itps: Sequence[Formula]) -> list[str]:
    return _default.check_interpolants(thetas, itps)
