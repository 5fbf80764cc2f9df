"""Emptiness by lazy predicate abstraction.

The abstract reachability tree is explored breadth-first.  Each tree node
is labelled with the abstraction of its parent's post-image under the
current predicates.  For every node and event there is either a child or
a covering edge to a node whose label is implied.  A spurious
counterexample adds interpolants of its least infeasible suffix to the
predicates and rebuilds the tree below the suffix's start node (the pivot).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import logic as L
from . import symbolic as S
from .automaton import Automaton
from .logic import Formula
from .search import BUDGET, EMPTY, NONEMPTY, Budget, Clock, Result, Stats, Tracer
from .smt import BudgetExceeded, Engine


@dataclass(eq=False)
class Node:
    id: int
    parent: "Node | None"
    event: str | None
    label: Formula
    depth: int
    children: dict = field(default_factory=dict)  # event -> Node
    covers: dict = field(default_factory=dict)  # event -> Node covering the successor
    alive: bool = True

    @property
    def path(self) -> tuple[str, ...]:
        out = []
        n = self
        while n.parent is not None:
            out.append(n.event)
            n = n.parent
        return tuple(reversed(out))

    def ancestors(self):
        """self, parent, ..., root."""
        n = self
        while n is not None:
            yield n
            n = n.parent

    def subtree(self):
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children.values())


@dataclass
class Pivot:
    node: Node
    suffix: tuple[str, ...]
    problem: S.UnfoldingProblem


class Art:
    def __init__(self, root: Node):
        self.root = root
        self.nodes: dict[int, Node] = {root.id: root}
        self.done: set[int] = set()  # the set N of processed nodes

    def live(self):
        return [n for n in self.nodes.values() if n.alive]

    def cover_edges(self):
        for n in self.nodes.values():
            for a, m in n.covers.items():
                yield n, a, m


class PredAbs:
    def __init__(self, A: Automaton, engine: Engine | None = None, budget: Budget | None = None,
                 tracer: Tracer | None = None, strategy: str = "proof", debug: bool = False):
        self.A = A
        self.engine = engine or Engine()
        self.budget = budget or Budget()
        self.tracer = tracer or Tracer()
        self.strategy = strategy
        self.debug = debug
        self.preds = S.PredicateSet()
        self.memo: dict = {}
        self.acc = S.acceptance(A)
        self.stats = Stats()
        self.refutations: list[dict] = []  # debug records
        self._next = 0

    def _new(self, parent, event, label) -> Node:
        n = Node(self._next, parent, event, label, 0 if parent is None else parent.depth + 1)
        self._next += 1
        self.art.nodes[n.id] = n
        self.stats.nodes += 1
        return n

    # -- main loop ---------------------------------------------------------
    def run(self) -> Result:
        clock = Clock(self.budget, self.engine)
        calls0 = self.engine.calls
        self.art = Art(Node(0, None, None, self.A.init, 0))
        self._next = 1
        self.stats.nodes = 1
        self.work: deque[Node] = deque([self.art.root])
        refuted = []
        try:
            while self.work:
                clock.check(self.stats.nodes)
                n = self.work.popleft()
                if not n.alive:
                    continue
                self.art.done.add(n.id)
                path = n.path
                if self.engine.is_sat(L.conj(n.label, self.acc)):
                    feas = S.feasibility(self.A, path, self.engine)
                    if feas.sat:
                        self.tracer.emit("feasible", n.id, path, n.label)
                        return self._result(NONEMPTY, clock, calls0, witness=feas.witness, refuted=refuted)
                    self._refine(n, path)
                    refuted.append(path)
                else:
                    self._expand(n)
        except BudgetExceeded as e:
            return self._result(BUDGET, clock, calls0, reason=str(e), refuted=refuted)
        return self._result(EMPTY, clock, calls0, refuted=refuted)

    def _result(self, verdict, clock, calls0, **kw) -> Result:
        self.stats.seconds = clock.elapsed()
        self.stats.solver_calls = self.engine.calls - calls0
        self.stats.predicates = len(self.preds)
        return Result(verdict, stats=self.stats, art=self.art, **kw)

    # -- refinement --------------------------------------------------------
    def find_pivot(self, n: Node, path: tuple[str, ...]) -> Pivot:
        """Shortest suffix of the path that is infeasible from its start node."""
        chain = list(n.ancestors())  # chain[j] is the ancestor j steps up
        for j in range(1, len(path) + 1):
            p = chain[j]
            v = path[len(path) - j:]
            prob = S.build_theta(self.A, v, seed=p.label)
            if not self.engine.is_sat(prob.formula):
                return Pivot(p, v, prob)
        # the empty path: the root label is the initial configuration
        raise AssertionError("no infeasible suffix although the path is spurious")

    def _refine(self, n: Node, path) -> None:
        self.stats.refinements += 1
        piv = self.find_pivot(n, path)
        p = piv.node
        itps = S.interpolants(self.A, piv.problem, self.engine, self.strategy, seed=p.label,
                              check=self.debug)
        added = [f for f in itps[1:-1] if self.preds.add(f)]
        self.tracer.emit("refine", n.id, path, n.label, pivot=p.id, suffix="".join(piv.suffix),
                         added=[str(f) for f in added])
        # drop the subtree strictly below p and forget p's own expansion
        removed = set()
        for m in p.subtree():
            if m is not p:
                m.alive = False
                removed.add(m.id)
                self.art.done.discard(m.id)
        removed.add(p.id)
        p.children.clear()
        p.covers.clear()
        # nodes covered by something in the removed subtree lose that cover
        for m in list(self.art.nodes.values()):
            if not m.alive or m is p:
                continue
            lost = [a for a, t in m.covers.items() if t.id in removed]
            if lost:
                for a in lost:
                    del m.covers[a]
                if m.id in self.art.done:
                    self.art.done.discard(m.id)
                    self.work.append(m)
        self.art.nodes = {i: m for i, m in self.art.nodes.items() if m.alive}
        self.art.done.discard(p.id)
        self.work.append(p)
        if self.debug:
            replay = S.abstract_accept(self.A, path, list(self.preds), self.engine)
            ok = not self.engine.is_sat(replay)
            self.refutations.append({"path": path, "pivot": p.id, "suffix": piv.suffix,
                                     "interpolants": itps, "progress": ok})
            if not ok:
                raise AssertionError(f"no progress on {''.join(path)}")

    # -- expansion ---------------------------------------------------------
    def _expand(self, n: Node) -> None:
        for a in self.A.events:
            if a in n.children or a in n.covers:
                continue
            phi = S.abstract_image(S.post(self.A, n.label, a), self.preds, self.engine, self.memo)
            target = self._find_cover(phi)
            if target is not None:
                n.covers[a] = target
                self.stats.covers += 1
                self.tracer.emit("cover", n.id, n.path + (a,), phi, target=target.id)
                continue
            s = self._new(n, a, phi)
            n.children[a] = s
            self.tracer.emit("expand", s.id, n.path + (a,), phi, parent=n.id)
            self._redirect(s)
            self.work.append(s)

    def _find_cover(self, phi: Formula) -> Node | None:
        for i in sorted(self.art.done):
            m = self.art.nodes.get(i)
            if m is None or not m.alive:
                continue
            if phi is m.label or self.engine.entails(phi, m.label):
                return m
        return None

    def _redirect(self, s: Node) -> None:
        """Retire fresh worklist leaves whose label implies the new node's."""
        R = [r for r in self.work
             if r.alive and r is not s and r.parent is not None and r.id not in self.art.done
             and not r.children and not r.covers and self.engine.entails(r.label, s.label)]
        for r in R:
            par = r.parent
            del par.children[r.event]
            par.covers[r.event] = s
            for m in self.art.nodes.values():
                for b, t in list(m.covers.items()):
                    if t is r:
                        m.covers[b] = s
            r.alive = False
            self.tracer.emit("redirect", r.id, r.path, r.label, target=s.id)
        if R:
            self.art.nodes = {i: m for i, m in self.art.nodes.items() if m.alive}


def check_emptiness_predabs(A: Automaton, budget: Budget | None = None, engine: Engine | None = None,
                            tracer: Tracer | None = None, strategy: str = "proof",
                            debug: bool = False) -> Result:
    return PredAbs(A, engine, budget, tracer, strategy, debug).run()
