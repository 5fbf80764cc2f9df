"""Plumbing shared by the emptiness procedures: budgets, results, tracing."""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import IO

from .automaton import DataWord
from .logic import Formula
from .smt import BudgetExceeded, Engine

EMPTY = "empty"
NONEMPTY = "nonempty"
BUDGET = "budget-exceeded"


@dataclass
class Budget:
    max_nodes: int = 10_000
    max_calls: int = 100_000
    timeout: float = 60.0


@dataclass
class Stats:
    nodes: int = 0
    solver_calls: int = 0
    refinements: int = 0
    covers: int = 0
    predicates: int = 0
    seconds: float = 0.0


@dataclass
class Result:
    verdict: str
    witness: DataWord | None = None
    stats: Stats = field(default_factory=Stats)
    reason: str = ""
    art: object = None
    refuted: list = field(default_factory=list)  # event sequences refuted, in order

    @property
    def empty(self) -> bool:
        return self.verdict == EMPTY

    def summary(self) -> str:
        s = self.stats
        line = (f"{self.verdict} nodes={s.nodes} calls={s.solver_calls} "
                f"refinements={s.refinements} time={s.seconds:.3f}s")
        if self.witness is not None:
            line += f" witness={self.witness}"
        if self.reason:
            line += f" ({self.reason})"
        return line


def digest(f: Formula) -> str:
    return hashlib.sha1(str(f).encode()).hexdigest()[:12]


class Tracer:
    """Line-delimited JSON records, one per search event."""

    def __init__(self, stream: IO[str] | None = None, keep: bool = False):
        self.stream = stream
        self.records: list[dict] | None = [] if keep else None

    @property
    def active(self) -> bool:
        return self.stream is not None or self.records is not None

    def emit(self, phase: str, node: int, path, formula: Formula | None = None, **extra) -> None:
        if not self.active:
            return
        rec = {"phase": phase, "node": node, "path": "".join(path) if path else "",
               "digest": digest(formula) if formula is not None else None}
        rec.update(extra)
        if self.records is not None:
            rec["formula"] = str(formula) if formula is not None else None
            self.records.append(rec)
        if self.stream is not None:
            self.stream.write(json.dumps({k: v for k, v in rec.items() if k != "formula"}) + "\n")


class Clock:
    """Wall-clock and node-count guard; solver calls are metered by the engine."""

    def __init__(self, budget: Budget, engine: Engine):
        self.budget = budget
        self.engine = engine
        self.start = time.perf_counter()
        engine.max_calls = engine.calls + budget.max_calls if budget.max_calls else None

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check(self, nodes: int) -> None:
        if nodes > self.budget.max_nodes:
            raise BudgetExceeded(f"node budget {self.budget.max_nodes} exhausted")
        if self.budget.timeout and self.elapsed() > self.budget.timeout:
            raise BudgetExceeded(f"time budget {self.budget.timeout}s exhausted")
