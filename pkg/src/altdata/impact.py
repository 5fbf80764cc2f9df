"""Emptiness by lazy abstraction with in-place label strengthening.

New tree nodes start labelled true.  When a dequeued node's path is
spurious, the interpolants of its unfolding are conjoined onto the labels
along the path, covering edges into strengthened nodes are dropped, and the
strengthened nodes are offered for covering by nodes earlier in the
length-lexicographic order of their paths.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import logic as L
from . import symbolic as S
from .automaton import Automaton
from .logic import Formula, Var
from .search import BUDGET, EMPTY, NONEMPTY, Budget, Clock, Result, Stats, Tracer
from .smt import BudgetExceeded, Engine


@dataclass(eq=False)
class Node:
    id: int
    parent: "Node | None"
    event: str | None
    path: tuple[str, ...]
    rset: frozenset[Var]
    conjuncts: list[Formula] = field(default_factory=list)
    children: list["Node"] = field(default_factory=list)
    theta: Formula | None = None  # stamped transition formula of the incoming edge
    cover: "Node | None" = None
    expanded: bool = False

    @property
    def label(self) -> Formula:
        return L.conj(*self.conjuncts)

    def ancestors(self):
        n = self
        while n is not None:
            yield n
            n = n.parent

    def descendants(self):
        stack = list(self.children)
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children)


class Impact:
    def __init__(self, A: Automaton, engine: Engine | None = None, budget: Budget | None = None,
                 tracer: Tracer | None = None, strategy: str = "proof", debug: bool = False):
        self.A = A
        self.engine = engine or Engine()
        self.budget = budget or Budget()
        self.tracer = tracer or Tracer()
        self.strategy = strategy
        self.debug = debug
        self.acc = S.acceptance(A)
        self.key = S.length_lex_key(A)
        self.stats = Stats()
        self.refutations: list[dict] = []
        self.nodes: list[Node] = []
        self.done: set[int] = set()

    # -- helpers -----------------------------------------------------------
    def _new(self, parent: Node | None, event: str | None) -> Node:
        if parent is None:
            theta0 = L.time_stamp(self.A.init, None, None, states=0)
            n = Node(0, None, None, (), theta0.fv_bool, [self.A.init] if self.A.init is not L.TRUE else [])
        else:
            k = len(parent.path) + 1
            th = S._step_theta(self.A, parent.rset, event, k)
            rs = frozenset(q for q in th.fv_bool if q.stamp == k)
            n = Node(len(self.nodes), parent, event, parent.path + (event,), rs, [], theta=th)
            parent.children.append(n)
        self.nodes.append(n)
        self.stats.nodes = len(self.nodes)
        return n

    def covered(self, n: Node) -> bool:
        return any(m.cover is not None for m in n.ancestors())

    def entails_label(self, x: Node, y: Node) -> bool:
        if all(any(c is d for d in x.conjuncts) for c in y.conjuncts):
            return True
        return self.engine.entails(x.label, y.label)

    def _unfolding(self, n: Node) -> S.UnfoldingProblem:
        chain = list(reversed(list(n.ancestors())))
        thetas = [L.time_stamp(self.A.init, None, None, states=0)]
        thetas += [m.theta for m in chain[1:]]
        k = len(n.path)
        thetas.append(L.conj(*(L.Not(L.bvar(q.at(k))) for q in self.A.nonfinal)))
        return S.UnfoldingProblem(n.path, thetas, [m.rset for m in chain])

    # -- main loop ---------------------------------------------------------
    def run(self) -> Result:
        clock = Clock(self.budget, self.engine)
        calls0 = self.engine.calls
        root = self._new(None, None)
        self.work: deque[Node] = deque([root])
        queued = {root.id}
        refuted = []
        try:
            while self.work:
                clock.check(len(self.nodes))
                n = self.work.popleft()
                queued.discard(n.id)
                if self.covered(n) or n.expanded:
                    continue
                self.done.add(n.id)
                if self.engine.is_sat(L.conj(n.label, self.acc)):
                    prob = self._unfolding(n)
                    res = self.engine.check_sat(prob.formula)
                    if res.sat:
                        w = S.word_from_model(self.A, n.path, res.model)
                        self.tracer.emit("feasible", n.id, n.path, n.label)
                        return self._result(NONEMPTY, clock, calls0, witness=w, refuted=refuted)
                    self._refine(n, prob)
                    refuted.append(n.path)
                    for m in self.nodes:
                        if (m.id not in queued and not m.expanded and m is not n
                                and not self.covered(m)):
                            self.work.append(m)
                            queued.add(m.id)
                if not self.covered(n):
                    self._expand(n)
                    for s in n.children:
                        self.work.append(s)
                        queued.add(s.id)
        except BudgetExceeded as e:
            return self._result(BUDGET, clock, calls0, reason=str(e), refuted=refuted)
        return self._result(EMPTY, clock, calls0, refuted=refuted)

    def _result(self, verdict, clock, calls0, **kw) -> Result:
        self.stats.seconds = clock.elapsed()
        self.stats.solver_calls = self.engine.calls - calls0
        self.stats.covers = sum(1 for m in self.nodes if m.cover is not None)
        return Result(verdict, stats=self.stats, art=self, **kw)

    # -- phases ------------------------------------------------------------
    def _refine(self, n: Node, prob: S.UnfoldingProblem) -> list[Node]:
        self.stats.refinements += 1
        itps = S.interpolants(self.A, prob, self.engine, self.strategy, check=self.debug)
        chain = list(reversed(list(n.ancestors())))
        b = False
        changed = []
        for i, ni in enumerate(chain):
            I = itps[i + 1]
            if I is L.TRUE or any(c is I for c in ni.conjuncts):
                continue
            if self.engine.entails(ni.label, I):
                continue
            for m in self.nodes:
                if m.cover is ni:
                    m.cover = None
            ni.conjuncts.append(I)
            changed.append(ni)
            self.tracer.emit("refine", ni.id, ni.path, ni.label, source=n.id)
            if not b:
                b = self.close(ni)
        if self.debug:
            replay = self._replay(n)
            self.refutations.append({"path": n.path, "interpolants": itps, "progress": replay})
            if not replay:
                raise AssertionError(f"no progress on {''.join(n.path)}")
        return changed

    def _replay(self, n: Node) -> bool:
        """The path's labels, read as an abstract run, now reject."""
        return not self.engine.is_sat(L.conj(n.label, self.acc))

    def close(self, x: Node) -> bool:
        kx = self.key(x.path)
        cands = sorted((self.nodes[i] for i in self.done), key=lambda m: self.key(m.path))
        for y in cands:
            if self.key(y.path) >= kx:
                break
            if self.covered(y):
                continue
            if self.entails_label(x, y):
                below = {x.id} | {d.id for d in x.descendants()}
                for m in self.nodes:
                    if m.cover is not None and m.cover.id in below:
                        m.cover = None
                x.cover = y
                self.tracer.emit("close", x.id, x.path, x.label, target=y.id)
                return True
        return False

    def _expand(self, n: Node) -> None:
        n.expanded = True
        for a in self.A.events:
            s = self._new(n, a)
            self.tracer.emit("expand", s.id, s.path, L.TRUE, parent=n.id)

    # -- inspection --------------------------------------------------------
    def well_labeled_violations(self) -> list[tuple[int, str, int]]:
        bad = []
        for m in self.nodes:
            if m.parent is None:
                continue
            if not self.engine.entails(S.post(self.A, m.parent.label, m.event), m.label):
                bad.append((m.parent.id, m.event, m.id))
        return bad


def check_emptiness_impact(A: Automaton, budget: Budget | None = None, engine: Engine | None = None,
                           tracer: Tracer | None = None, strategy: str = "proof",
                           debug: bool = False) -> Result:
    return Impact(A, engine, budget, tracer, strategy, debug).run()
