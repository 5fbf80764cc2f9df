import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altdata import fm
from altdata import logic as L
from altdata import smt
from altdata.sexpr import parse_formula as P
from altdata.smt import BudgetExceeded, Engine, SatisfiableError

from randgen import rand_atom, rand_qf

x, y = L.data("x"), L.data("y")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _sound(f, res):
    nu = {v: (bool(res.model.get(v, False)) if v.sort is L.Sort.BOOL else res.model.get(v, Fraction(0)))
          for v in f.fv}
    return L.evaluate_ground(f, nu)


def test_sat_examples():
    assert smt.check_sat(P("(and (= x@1 0) (= y@1 0) (> x@1 y@1))")).unsat
    r = smt.check_sat(L.TRUE)
    assert r.sat and r.model == {}
    f = P("(and (> x 0) (< x 1) (or q (> y x)))")
    r = smt.check_sat(f)
    assert r.sat and _sound(f, r)


def test_entailment_examples():
    assert smt.entails(P("(and (= x 0) (= y 0))"), P("(> y (- x 1))"))
    f = P("(or q (> x 3))")
    assert smt.entails(f, f)
    assert not smt.entails(P("(> x 0)"), P("(>= x 1)"))
    r = smt.check_sat(P("(and (> x 0) (not (>= x 1)))"))
    assert r.sat and 0 < r.model[x] < 1


def test_entails_rejects_right_existentials():
    with pytest.raises(L.LogicError):
        smt.entails(L.TRUE, L.Exists([y], L.gt(x, y)))


def test_left_existentials_are_renamed():
    e = Engine()
    a = L.Exists([y], L.And(L.gt(x, y), L.gt(y, 0)))
    assert e.entails(a, L.gt(x, 0))
    assert not e.entails(a, L.gt(x, 1))


def test_fig1_first_step_interpolants():
    q0, q1, q2 = (L.state(f"q{i}") for i in range(3))
    thetas = [L.bvar(q0.at(0)),
              L.implies(L.bvar(q0.at(0)), P("(and q1@1 q2@1 (= x@1 0) (= y@1 0))")),
              P("(and (not q0@1) (not q1@1) (not q2@1))")]
    for strategy in ("proof", "exact"):
        itps = smt.interpolate_sequence(thetas, strategy)
        assert itps[0] is L.TRUE and itps[-1] is L.FALSE and len(itps) == 4
        assert smt.check_interpolants(thetas, itps) == []


def test_degenerate_sequence():
    itps = smt.interpolate_sequence([L.FALSE], "proof")
    assert itps == [L.TRUE, L.FALSE]
    itps = smt.interpolate_sequence([L.FALSE, L.TRUE])
    assert itps[1] is L.FALSE


def test_interpolating_a_satisfiable_sequence_fails():
    with pytest.raises(SatisfiableError) as e:
        smt.interpolate_sequence([P("(> x@0 0)"), P("(> x@1 x@0)")])
    assert e.value.model[x.at(1)] > e.value.model[x.at(0)] > 0
    with pytest.raises(SatisfiableError):
        smt.interpolate_sequence([P("(> x@0 0)"), P("(> x@1 x@0)")], "exact")


def _pigeonhole(n):
    p = [[L.state(f"p{i}_{j}") for j in range(n - 1)] for i in range(n)]
    cls = [L.Or(*(L.bvar(v) for v in row)) for row in p]
    for j in range(n - 1):
        for i in range(n):
            for k in range(i + 1, n):
                cls.append(L.Or(L.Not(L.bvar(p[i][j])), L.Not(L.bvar(p[k][j]))))
    return L.And(*cls)


def test_budgets_are_explicit():
    with pytest.raises(BudgetExceeded):
        Engine(max_conflicts=3).check_sat(_pigeonhole(5))
    assert Engine().check_sat(_pigeonhole(5)).unsat
    e = Engine(max_calls=1)
    e.check_sat(P("(> x 0)"))
    with pytest.raises(BudgetExceeded):
        e.check_sat(P("(> x 1)"))


def test_results_are_cached():
    e = Engine()
    f = P("(and (> x 0) (< x 2))")
    e.check_sat(f)
    e.check_sat(f)
    assert e.calls == 1 and e.cache_hits == 1


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_agrees_with_fourier_motzkin(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, [x, y, L.data("z"), L.data("w")], [L.state("a"), L.state("b")], 6)
    r = Engine().check_sat(f)
    assert r.sat == fm.oracle_sat(f)
    if r.sat:
        assert _sound(f, r)


def _chain(rng, n):
    """theta_i relates x_{i-1} and x_i (and a boolean per step); often unsat."""
    thetas = []
    for i in range(n + 1):
        vs = [x.at(i), y.at(i)] + ([x.at(i - 1), y.at(i - 1)] if i else [])
        parts = [rand_atom(rng, vs) for _ in range(rng.randint(1, 3))]
        b = L.bvar(L.state("p").at(i))
        if i:
            parts.append(L.Or(L.Not(L.bvar(L.state("p").at(i - 1))), b) if rng.random() < 0.5 else b)
        thetas.append(L.And(*parts))
    return thetas


@settings(max_examples=120, deadline=None)
@given(seeds, st.sampled_from(["proof", "exact"]))
def test_interpolation_contract(seed, strategy):
    rng = random.Random(seed)
    thetas = _chain(rng, rng.randint(1, 4))
    e = Engine()
    if e.is_sat(L.conj(*thetas)):
        with pytest.raises(SatisfiableError):
            e.interpolate_sequence(thetas, strategy)
        return
    itps = e.interpolate_sequence(thetas, strategy)
    assert e.check_interpolants(thetas, itps) == []
