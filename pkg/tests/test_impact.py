import random

from hypothesis import given, settings
from hypothesis import strategies as st

from altdata import logic as L
from altdata import symbolic as S
from altdata.automaton import membership
from altdata.impact import Impact, check_emptiness_impact
from altdata.io import parse_automaton
from altdata.predabs import check_emptiness_predabs
from altdata.search import BUDGET, EMPTY, NONEMPTY, Budget, Tracer
from altdata.sexpr import parse_formula as P
from altdata.smt import Engine

from randgen import rand_automaton

BOTTOM = "events: a b\nvars: x\nstates: q\ninit: false\nfinal: q\nrule q a (and q (> x 0))\n"


def node_at(imp, path):
    return next(n for n in imp.nodes if n.path == tuple(path))


def test_running_example(fig1):
    e = Engine()
    imp = Impact(fig1, tracer=Tracer(keep=True), debug=True)
    res = imp.run()
    assert res.verdict == EMPTY and res.stats.nodes < 200
    a = node_at(imp, "a")
    # a hand-derived invariant for this node entails the computed label
    assert e.entails(P("(and q1 (<= x 0) q2 (>= y 0))"), a.label)
    assert e.entails(a.label, P("(and q1 q2)"))
    assert all(r["progress"] for r in imp.refutations)
    assert imp.well_labeled_violations() == []


def test_first_refinement_strengthens_a_to_q1(fig1):
    t = Tracer(keep=True)
    check_emptiness_impact(fig1, tracer=t)
    first = next(r for r in t.records if r["phase"] == "refine")
    assert first["path"] == "a" and first["formula"] == "q1"


def test_empty_initial_configuration():
    imp = Impact(parse_automaton(BOTTOM))
    res = imp.run()
    assert res.verdict == EMPTY
    assert Engine().entails(imp.nodes[0].label, L.FALSE)
    # the children are refuted on their own and closed against the root
    assert all(n.cover is imp.nodes[0] for n in imp.nodes[1:])


def test_witness_on_the_modified_example(fig1_ge):
    res = check_emptiness_impact(fig1_ge)
    assert res.verdict == NONEMPTY
    assert len(res.witness) <= 2 and membership(fig1_ge, res.witness)


def _scripted(fig1):
    imp = Impact(fig1)
    root = imp._new(None, None)
    imp._expand(root)
    a, b = root.children
    imp._expand(a)
    imp._expand(b)
    aa, ab = a.children
    ba, bb = b.children
    imp.done |= {root.id, a.id, b.id, aa.id}
    return imp, root, a, aa, bb


def test_close_uncovers_below_the_covered_node(fig1):
    imp, root, a, aa, bb = _scripted(fig1)
    bb.cover = aa
    a.conjuncts.append(L.FALSE)
    assert imp.close(a)
    assert a.cover is root and bb.cover is None
    assert imp.covered(aa) and not imp.covered(bb)


def test_close_only_looks_at_earlier_uncovered_nodes(fig1):
    imp, root, a, aa, bb = _scripted(fig1)
    root.conjuncts.append(P("q3"))
    # true does not entail root's q0 & q3, and aa is later than a
    assert not imp.close(a)
    assert a.cover is None


def test_strengthening_with_an_entailed_formula_is_a_no_op(fig1):
    imp, root, a, aa, bb = _scripted(fig1)
    a.conjuncts.append(P("(and q1 q2)"))
    bb.cover = a
    prob = S.build_theta(fig1, "a")
    prob_itps = [L.TRUE, fig1.init, P("q1"), L.FALSE]
    orig = S.interpolants
    S.interpolants = lambda *args, **kw: prob_itps
    try:
        changed = imp._refine(a, prob)
    finally:
        S.interpolants = orig
    assert a not in changed and bb.cover is a


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_agrees_with_predabs_and_stays_well_labelled(seed):
    rng = random.Random(seed)
    A = rand_automaton(rng, restricted=False)
    b = Budget(max_nodes=400, timeout=20)
    imp = Impact(A, budget=b, debug=True)
    r1 = imp.run()
    r2 = check_emptiness_predabs(A, budget=b)
    if BUDGET in (r1.verdict, r2.verdict):
        return
    assert r1.verdict == r2.verdict
    if r1.verdict == NONEMPTY:
        assert membership(A, r1.witness)
    else:
        assert imp.well_labeled_violations() == []
        key = imp.key
        for n in imp.nodes:
            if n.cover is not None:
                assert key(n.cover.path) < key(n.path)
                assert imp.engine.entails(n.label, n.cover.label)
            elif not imp.covered(n):
                assert n.expanded


def test_budget(corpus):
    res = check_emptiness_impact(corpus["counter_reach"], budget=Budget(max_nodes=3))
    assert res.verdict == BUDGET
