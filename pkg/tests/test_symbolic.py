import random

from hypothesis import given, settings
from hypothesis import strategies as st

from altdata import fm
from altdata import logic as L
from altdata import symbolic as S
from altdata.automaton import membership
from altdata.io import parse_automaton
from altdata.sexpr import parse_formula as P
from altdata.smt import Engine

from randgen import rand_automaton, rand_positive

seeds = st.integers(min_value=0, max_value=2**32 - 1)
q = [L.state(f"q{i}") for i in range(5)]
EPS = "events: a\nvars: x\nstates: q\ninit: q\nfinal: q\n"


def equivalent(e, f, g):
    return e.entails(f, g) and e.entails(g, f)


def test_post_examples(fig1):
    e = Engine()
    p = S.post(fig1, L.bvar(q[0]), "a")
    assert equivalent(e, p, P("(and q1 q2 (= x 0) (= y 0))"))
    assert S.post(fig1, L.FALSE, "a") is L.FALSE
    pb = S.post(fig1, P("(and q1 q2 (= x 0) (= y 0))"), "b")
    # the old values are pinned to 0 and the q2 rule needs (pre x) > (pre y)
    assert pb is not L.FALSE and e.entails(pb, L.FALSE)
    assert not S.feasibility(fig1, "ab", e).sat


def test_acceptance_formula(fig1):
    acc = S.acceptance(fig1)
    assert acc.fv == {q[0], q[1], q[2]}


def test_abstract_image_examples(fig1):
    e = Engine()
    phi = S.post(fig1, L.bvar(q[0]), "a")
    assert S.abstract_image(phi, S.PredicateSet(), e) is L.TRUE
    assert S.abstract_image(L.FALSE, S.PredicateSet(), e) is L.FALSE
    p1, p2 = P("(and (<= x 0) q2 (>= y 0))"), P("(and q1 q2)")
    img = S.abstract_image(phi, S.PredicateSet([p1, p2, P("(> x 0)")]), e)
    assert set(L.conjuncts(img)) >= set(L.conjuncts(p1)) | set(L.conjuncts(p2))
    assert not e.entails(img, P("(> x 0)"))


def test_predicate_set_always_has_false():
    ps = S.PredicateSet([L.TRUE, P("q1"), P("q1")])
    assert list(ps) == [L.FALSE, P("q1")]
    assert not ps.add(L.FALSE)


def test_build_theta_first_step(fig1):
    prob = S.build_theta(fig1, "a")
    t0, t1, t2 = prob.thetas
    assert t0 is L.bvar(q[0].at(0))
    assert t1 is L.implies(L.bvar(q[0].at(0)), P("(and q1@1 q2@1 (= x@1 0) (= y@1 0))"))
    assert set(L.conjuncts(t2)) == {L.Not(L.bvar(v.at(1))) for v in q[:3]}
    assert not Engine().is_sat(prob.formula)


def test_build_theta_replacement_sets(fig1):
    prob = S.build_theta(fig1, "aab")
    at = lambda k, *ix: frozenset(q[i].at(k) for i in ix)
    assert prob.rsets == [at(0, 0), at(1, 1, 2), at(2, 1, 2, 3), at(3, 3, 4)]


def test_empty_word_unfolding():
    A = parse_automaton(EPS)
    prob = S.build_theta(A, "")
    assert len(prob.thetas) == 2 and Engine().is_sat(prob.formula)


def test_build_theta_rejects_unknown_events(fig1):
    try:
        S.build_theta(fig1, "c")
    except L.LogicError:
        return
    raise AssertionError("event outside the alphabet accepted")


def test_feasibility_examples(fig1, fig1_ge):
    e = Engine()
    assert not S.feasibility(fig1, "a", e).sat
    f = S.feasibility(fig1_ge, "ab", e)
    assert f.sat and membership(fig1_ge, f.witness)
    x, y = fig1_ge.vars
    assert f.witness.symbols[0][1] == {x: 0, y: 0}
    B = parse_automaton("events: a\nvars: x\nstates: q\ninit: false\nfinal: q\n")
    assert not S.feasibility(B, "aa", e).sat


def test_bounded_oracle_examples(fig1, fig1_ge):
    assert S.bounded_oracle(fig1, 6).empty_up_to_bound
    o = S.bounded_oracle(parse_automaton(EPS), 0)
    assert o.witness is not None and len(o.witness) == 0
    o = S.bounded_oracle(fig1_ge, 2)
    assert len(o.witness) == 2 and membership(fig1_ge, o.witness)


def test_positivize_keeps_positive_sequences(fig1):
    prob = S.build_theta(fig1, "a")
    seq = [L.TRUE, L.bvar(q[0]), L.bvar(q[1]), L.FALSE]
    assert S.positivize(fig1, prob, seq) == seq


def test_positivize_replaces_first_element_by_init(fig1):
    prob = S.build_theta(fig1, "a")
    seq = [L.TRUE, P("(and q0 (or (not q4) q0))"), L.bvar(q[1]), L.FALSE]
    out = S.positivize(fig1, prob, seq)
    assert out[1] is fig1.init
    assert S.contract_violations(prob, out, Engine()) == []


def test_positivize_repairs_by_exact_post(fig1):
    e = Engine()
    prob = S.build_theta(fig1, "a")
    bad = P("(and q1 (or (not q4) q2))")
    seq = [L.TRUE, L.bvar(q[0]), bad, L.FALSE]
    assert S.contract_violations(prob, seq, e) == ["I_1 has a negative state occurrence"]
    out = S.positivize(fig1, prob, seq)
    assert L.is_positive(out[2])
    assert equivalent(e, out[2], fm.project(S.post(fig1, L.bvar(q[0]), "a"),
                                            set(fig1.states) | set(fig1.vars)))
    assert S.contract_violations(prob, out, e) == []


def test_progress_after_refinement(fig1):
    e = Engine()
    preds = S.PredicateSet()
    for u in ("a", "ab", "aab", "aaab"):
        prob = S.build_theta(fig1, u)
        assert not e.is_sat(prob.formula)
        for f in S.interpolants(fig1, prob, e, check=True)[1:-1]:
            preds.add(f)
        assert not e.is_sat(S.abstract_accept(fig1, u, list(preds), e))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_abstraction_over_approximates(seed):
    rng = random.Random(seed)
    A = rand_automaton(rng, restricted=False)
    e = Engine()
    preds = S.PredicateSet(rand_positive(rng, A.states, list(A.vars), 2) for _ in range(4))
    phi = S.post(A, rand_positive(rng, A.states, list(A.vars), 3), "a")
    assert e.entails(phi, S.abstract_image(phi, preds, e))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_feasibility_witnesses_are_members(seed):
    rng = random.Random(seed)
    A = rand_automaton(rng, restricted=False)
    e = Engine()
    u = "".join(rng.choice(A.events) for _ in range(rng.randint(0, 3)))
    f = S.feasibility(A, u, e)
    if f.sat:
        assert membership(A, f.witness)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(["proof", "exact"]))
def test_interpolants_satisfy_the_contract(seed, strategy):
    rng = random.Random(seed)
    A = rand_automaton(rng, restricted=False)
    e = Engine()
    u = "".join(rng.choice(A.events) for _ in range(rng.randint(0, 3)))
    prob = S.build_theta(A, u)
    if e.is_sat(prob.formula):
        return
    seq = S.interpolants(A, prob, e, strategy)
    assert S.contract_violations(prob, seq, e) == []
