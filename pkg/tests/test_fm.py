import random

from hypothesis import given, settings
from hypothesis import strategies as st

from altdata import fm
from altdata import logic as L
from altdata.sexpr import parse_formula as P
from altdata.smt import Engine

from randgen import rand_qf

x, y, z = L.data("x"), L.data("y"), L.data("z")
b = L.state("b")


def test_oracle_examples():
    assert not fm.oracle_sat(P("(and (= x 0) (= y 0) (> x y))"))
    assert fm.oracle_sat(P("(and (> x 0) (< x 1))"))
    assert not fm.oracle_sat(P("(and (> x y) (> y z) (> z x))"))
    assert fm.oracle_sat(P("(or (and b (> x 0)) (and (not b) (< x 0)))"))
    assert not fm.oracle_sat(P("(and b (not b))"))
    assert fm.oracle_sat(L.TRUE) and not fm.oracle_sat(L.FALSE)


def test_strict_bounds_over_the_rationals():
    # 2x > 1 and 2x < 2 has the model x = 3/4 but no integer one
    assert fm.oracle_sat(P("(and (> (* 2 x) 1) (< (* 2 x) 2))"))
    assert not fm.oracle_sat(P("(and (>= x 1) (< x 1))"))


def test_existentials_are_stripped():
    assert fm.oracle_sat(P("(exists ((z Data)) (and (> z x) (< z y)))"))


def test_project_interval():
    f = P("(and (< x z) (< z y))")
    g = fm.project(f, {x, y})
    e = Engine()
    assert e.entails(g, L.lt(x, y)) and e.entails(L.lt(x, y), g)


def test_project_keeps_booleans():
    f = P("(or (and b (= x 1)) (and (not b) (= x 2)))")
    g = fm.project(f, {b})
    assert g is L.TRUE or Engine().entails(L.TRUE, g)
    h = fm.project(P("(and (= x (+ y 1)) (> y 0))"), {x})
    assert Engine().entails(h, L.gt(x, 1)) and Engine().entails(L.gt(x, 1), h)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_project_is_exact(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, [x, y, z], [b], 4)
    keep = {x, b}
    g = fm.project(f, keep)
    e = Engine()
    assert g.fv <= keep
    assert e.entails(f, g)
    # every model of g extends to a model of f
    r = e.check_sat(g)
    if r.sat:
        fixed = {v: (L.const(bool(r.model.get(v, False))) if v.sort is L.Sort.BOOL
                     else r.model.get(v, 0)) for v in keep}
        assert e.is_sat(L.substitute(f, fixed, simplify=True))
