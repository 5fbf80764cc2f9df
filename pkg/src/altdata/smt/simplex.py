"""Incremental general simplex over rationals with infinitesimals.

Follows the tableau-with-bounds scheme used in DPLL(T) arithmetic solvers:
the tableau stays fixed across backtracking and only bounds are undone.
Values are pairs ``(a, b)`` standing for ``a + b*delta``; ordinary tuple
comparison then orders them correctly for an infinitesimal delta.

Conflicts come with Farkas coefficients: each returned ``(reason, k)`` pair
names the literal that asserted a bound and a positive multiplier such that
the weighted sum of the bound constraints reduces to ``0 <= negative``.
"""
from __future__ import annotations

from fractions import Fraction

ZERO = (Fraction(0), Fraction(0))


def _add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _scale(k, p):
    return (k * p[0], k * p[1])


class Simplex:
    def __init__(self, nvars: int = 0):
        self.n = 0
        self.val: list = []
        self.lo: list = []
        self.hi: list = []
        self.rows: dict[int, dict[int, Fraction]] = {}  # basic -> {nonbasic: coeff}
        self.cols: list[set[int]] = []  # nonbasic -> rows mentioning it
        self.trail: list = []
        self.pivots = 0
        for _ in range(nvars):
            self.new_var()

    def new_var(self) -> int:
        i = self.n
        self.n += 1
        self.val.append(ZERO)
        self.lo.append(None)
        self.hi.append(None)
        self.cols.append(set())
        return i

    def add_row(self, coeffs: dict[int, Fraction]) -> int:
        """New basic variable equal to ``sum(coeffs[j] * x_j)``."""
        s = self.new_var()
        row: dict[int, Fraction] = {}
        for j, c in coeffs.items():
            if j in self.rows:
                for k, d in self.rows[j].items():
                    row[k] = row.get(k, 0) + c * d
            else:
                row[j] = row.get(j, 0) + c
        row = {k: c for k, c in row.items() if c != 0}
        self.rows[s] = row
        for k in row:
            self.cols[k].add(s)
        v = ZERO
        for k, c in row.items():
            v = _add(v, _scale(c, self.val[k]))
        self.val[s] = v
        return s

    # bounds -------------------------------------------------------------
    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            side, i, old = self.trail.pop()
            (self.lo if side == 0 else self.hi)[i] = old

    def assert_upper(self, i: int, bound, reason):
        """Returns a conflict (list of (reason, coeff)) or None."""
        cur = self.hi[i]
        if cur is not None and cur[0] <= bound:
            return None
        lo = self.lo[i]
        if lo is not None and bound < lo[0]:
            return [(reason, Fraction(1)), (lo[1], Fraction(1))]
        self.trail.append((1, i, cur))
        self.hi[i] = (bound, reason)
        if i not in self.rows and self.val[i] > bound:
            self._update(i, bound)
        return None

    def assert_lower(self, i: int, bound, reason):
        cur = self.lo[i]
        if cur is not None and cur[0] >= bound:
            return None
        hi = self.hi[i]
        if hi is not None and bound > hi[0]:
            return [(reason, Fraction(1)), (hi[1], Fraction(1))]
        self.trail.append((0, i, cur))
        self.lo[i] = (bound, reason)
        if i not in self.rows and self.val[i] < bound:
            self._update(i, bound)
        return None

    # core ---------------------------------------------------------------
    def _update(self, j: int, v) -> None:
        d = _sub(v, self.val[j])
        for b in self.cols[j]:
            self.val[b] = _add(self.val[b], _scale(self.rows[b][j], d))
        self.val[j] = v

    def _pivot(self, b: int, j: int) -> None:
        """Basic ``b`` leaves, nonbasic ``j`` enters."""
        self.pivots += 1
        row = self.rows.pop(b)
        a = row.pop(j)
        for k in row:
            self.cols[k].discard(b)
        self.cols[j].discard(b)
        # j = (b - sum_{k != j} row[k] x_k) / a
        new = {k: -c / a for k, c in row.items()}
        new[b] = 1 / a
        for r in list(self.cols[j]):
            rr = self.rows[r]
            c = rr.pop(j)
            for k, e in new.items():
                nv = rr.get(k, 0) + c * e
                if nv == 0:
                    if k in rr:
                        del rr[k]
                        self.cols[k].discard(r)
                else:
                    if k not in rr:
                        self.cols[k].add(r)
                    rr[k] = nv
        self.cols[j] = set()
        self.rows[j] = new
        for k in new:
            self.cols[k].add(j)

    def _pivot_and_update(self, b: int, j: int, v) -> None:
        a = self.rows[b][j]
        theta = _scale(1 / a, _sub(v, self.val[b]))
        self.val[b] = v
        self.val[j] = _add(self.val[j], theta)
        for r in self.cols[j]:
            if r != b:
                self.val[r] = _add(self.val[r], _scale(self.rows[r][j], theta))
        self._pivot(b, j)

    def check(self):
        """Restore feasibility; returns None or a Farkas conflict."""
        while True:
            bad = None
            for b in sorted(self.rows):
                v = self.val[b]
                lo, hi = self.lo[b], self.hi[b]
                if lo is not None and v < lo[0]:
                    bad = (b, True)
                    break
                if hi is not None and v > hi[0]:
                    bad = (b, False)
                    break
            if bad is None:
                return None
            b, below = bad
            row = self.rows[b]
            entering = None
            for j in sorted(row):
                a = row[j]
                if below:
                    ok = (a > 0 and (self.hi[j] is None or self.val[j] < self.hi[j][0])) or \
                         (a < 0 and (self.lo[j] is None or self.val[j] > self.lo[j][0]))
                else:
                    ok = (a < 0 and (self.hi[j] is None or self.val[j] < self.hi[j][0])) or \
                         (a > 0 and (self.lo[j] is None or self.val[j] > self.lo[j][0]))
                if ok:
                    entering = j
                    break
            if entering is None:
                return self._explain(b, below)
            target = self.lo[b][0] if below else self.hi[b][0]
            self._pivot_and_update(b, entering, target)

    def _explain(self, b: int, below: bool):
        row = self.rows[b]
        out = [((self.lo if below else self.hi)[b][1], Fraction(1))]
        for j, a in row.items():
            if below:
                src = self.hi[j] if a > 0 else self.lo[j]
            else:
                src = self.lo[j] if a > 0 else self.hi[j]
            out.append((src[1], abs(a)))
        return out

    def concrete_values(self) -> list[Fraction]:
        """Pick a positive delta small enough for every bound and evaluate."""
        delta = Fraction(1)
        for i in range(self.n):
            v = self.val[i]
            for side in (self.lo[i], self.hi[i]):
                if side is None:
                    continue
                bnd = side[0]
                lo, hi = (bnd, v) if side is self.lo[i] else (v, bnd)
                # need lo.a + lo.b d <= hi.a + hi.b d
                if lo[0] < hi[0] and lo[1] > hi[1]:
                    delta = min(delta, (hi[0] - lo[0]) / (lo[1] - hi[1]))
        delta /= 2
        return [v[0] + v[1] * delta for v in self.val]
