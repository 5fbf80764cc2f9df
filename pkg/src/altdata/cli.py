"""Command-line interface: ``altdata {check,member,op,include,bench}``.

Exit codes:

* 0: empty / accepted / included / all bench verdicts as expected
* 1: nonempty / rejected / not included / a bench verdict mismatch
* 2: usage error
* 3: input error (unreadable file, lexical, syntax, sort or positivity error)
* 4: budget exhausted
* 5: bounded enumeration found no witness up to its bound (``--method oracle``)

Automaton arguments are paths; ``@name`` refers to ``name.ada`` in the
bundled corpus (``@name`` for a word argument means ``name.tsv``).
"""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from . import automaton as AUT
from .impact import check_emptiness_impact
from .io import AdaError, load_automaton, parse_word, print_automaton, print_word
from .predabs import check_emptiness_predabs
from .search import BUDGET, EMPTY, NONEMPTY, Budget, Result, Tracer
from .smt import Engine
from .symbolic import bounded_oracle

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_BOUNDED = 0, 1, 2, 3, 4, 5
METHODS = ("impact", "predabs", "oracle")


class InputError(Exception):
    pass


def corpus_dir() -> Path:
    return Path(str(resources.files("altdata") / "corpus"))


def corpus_files(directory: Path | None = None) -> list[Path]:
    return sorted((directory or corpus_dir()).glob("*.ada"))


def load_expected(path: Path) -> dict[str, str]:
    out = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        out[cols[0]] = cols[1]
    return out


def resolve(arg: str, ext: str = ".ada") -> Path:
    if arg.startswith("@"):
        p = corpus_dir() / (arg[1:] + ext)
        if not p.exists():
            raise InputError(f"{arg}: no such corpus file")
        return p
    return Path(arg)


def read_automaton(arg: str) -> AUT.Automaton:
    p = resolve(arg)
    try:
        return load_automaton(p)
    except OSError as e:
        raise InputError(f"{p}: {e.strerror or e}") from None
    except AdaError as e:
        raise InputError(f"{p}:{e.line}:{e.col}: error[{e.code}]: {e.msg}") from None


def parse_budget(text: str | None, timeout: float | None = None) -> Budget:
    b = Budget()
    if timeout is not None:
        b.timeout = timeout
    if not text:
        return b
    names = {"nodes": "max_nodes", "calls": "max_calls", "time": "timeout"}
    for item in text.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in names or not val:
            raise argparse.ArgumentTypeError(f"bad budget item {item!r} (use nodes=N,calls=N,time=S)")
        try:
            setattr(b, names[key], float(val) if key == "time" else int(val))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad budget value {val!r}") from None
    return b


def run_method(A, method: str, budget: Budget, bound: int = 6, tracer: Tracer | None = None,
               strategy: str = "proof") -> Result:
    """One emptiness check; the oracle is wrapped into a ``Result`` too."""
    if method == "impact":
        return check_emptiness_impact(A, budget, Engine(), tracer, strategy)
    if method == "predabs":
        return check_emptiness_predabs(A, budget, Engine(), tracer, strategy)
    if method == "oracle":
        t = time.perf_counter()
        o = bounded_oracle(A, bound, Engine())
        r = Result(NONEMPTY if o.witness is not None else f"empty-up-to-{bound}", o.witness)
        r.stats.nodes = o.explored
        r.stats.seconds = time.perf_counter() - t
        return r
    raise ValueError(f"unknown method {method!r}")


def _verdict_code(verdict: str) -> int:
    if verdict == EMPTY:
        return EXIT_OK
    if verdict == NONEMPTY:
        return EXIT_NO
    if verdict == BUDGET:
        return EXIT_BUDGET
    return EXIT_BOUNDED


# -- subcommands -------------------------------------------------------------


def cmd_check(args, out) -> int:
    A = read_automaton(args.automaton)
    budget = parse_budget(args.budget)
    stream = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        r = run_method(A, args.method, budget, args.bound, Tracer(stream), args.strategy)
    finally:
        if stream:
            stream.close()
    print(r.verdict, file=out)
    if r.witness is not None:
        print("# witness", file=out)
        out.write(print_word(r.witness, A))
    s = r.stats
    print(f"# nodes={s.nodes} calls={s.solver_calls} refinements={s.refinements} "
          f"time={s.seconds:.3f}s" + (f" reason={r.reason}" if r.reason else ""), file=out)
    return _verdict_code(r.verdict)


def cmd_member(args, out) -> int:
    A = read_automaton(args.automaton)
    p = resolve(args.word, ".tsv")
    try:
        w = parse_word(p.read_text(encoding="utf-8"), A)
    except OSError as e:
        raise InputError(f"{p}: {e.strerror or e}") from None
    except AdaError as e:
        raise InputError(f"{p}:{e.line}:{e.col}: error[{e.code}]: {e.msg}") from None
    ok = AUT.membership(A, w)
    print("accepted" if ok else "rejected", file=out)
    return EXIT_OK if ok else EXIT_NO


def cmd_op(args, out) -> int:
    if args.operation == "complement":
        if len(args.automata) != 1:
            raise InputError("complement takes exactly one automaton")
        C = AUT.complement(read_automaton(args.automata[0]))
    else:
        if len(args.automata) < 2:
            raise InputError(f"{args.operation} takes at least two automata")
        auts = [read_automaton(a) for a in args.automata]
        f = AUT.union if args.operation == "union" else AUT.intersection
        C = auts[0]
        try:
            for B in auts[1:]:
                C = f(C, B)
        except AUT.L.LogicError as e:
            raise InputError(str(e)) from None
    text = print_automaton(C)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def inclusion_automaton(A, B):
    """``A & ~B``: empty exactly when L(A) is included in L(B)."""
    return AUT.intersection(A, AUT.complement(B))


def cmd_include(args, out) -> int:
    A = read_automaton(args.left)
    B = read_automaton(args.right)
    try:
        C = inclusion_automaton(A, B)
    except AUT.L.LogicError as e:
        raise InputError(str(e)) from None
    r = run_method(C, args.method, parse_budget(args.budget), args.bound, strategy=args.strategy)
    if r.verdict == EMPTY:
        print("included", file=out)
    elif r.verdict == NONEMPTY:
        print("not included", file=out)
        print("# counterexample (accepted by the first automaton, not by the second)", file=out)
        out.write(print_word(r.witness, C))
    else:
        print(r.verdict, file=out)
    s = r.stats
    print(f"# nodes={s.nodes} calls={s.solver_calls} time={s.seconds:.3f}s", file=out)
    return _verdict_code(r.verdict)


class MethodRun(NamedTuple):
    verdict: str
    nodes: int
    seconds: float
    refinements: int


@dataclass
class BenchRow:
    name: str
    size: int
    expected: str | None
    results: dict  # method -> MethodRun

    def matches(self) -> bool:
        if self.expected is None:
            return True
        return all(v == self.expected or (self.expected == EMPTY and v.startswith("empty-up-to-"))
                   for v in (run.verdict for run in self.results.values()))


def bench_one(path: str, methods: tuple[str, ...], budget: Budget, expected: str | None) -> BenchRow:
    A = load_automaton(path)
    res = {}
    for m in methods:
        r = run_method(A, m, budget)
        verdict = r.verdict
        if r.witness is not None and not AUT.membership(A, r.witness):
            verdict = "unsound-witness"
        res[m] = MethodRun(verdict, r.stats.nodes, r.stats.seconds, r.stats.refinements)
    return BenchRow(A.name, A.size, expected, res)


def run_bench(files, methods=("impact", "predabs"), budget: Budget | None = None,
              expected: dict | None = None, jobs: int = 1) -> list[BenchRow]:
    budget = budget or Budget()
    expected = expected or {}
    todo = [(str(p), methods, budget, expected.get(Path(p).stem)) for p in files]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(bench_one, *zip(*todo)))
    return [bench_one(*t) for t in todo]


def format_bench(rows: list[BenchRow], methods) -> str:
    head = ["name", "|A|", "expected"]
    for m in methods:
        head += [f"{m}", f"{m}.nodes", f"{m}.time"]
    table = [head]
    for r in rows:
        line = [r.name, str(r.size), r.expected or "?"]
        for m in methods:
            run = r.results[m]
            line += [run.verdict, str(run.nodes), f"{run.seconds:.2f}s"]
        table.append(line)
    widths = [max(len(row[i]) for row in table) for i in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
                     for row in table) + "\n"


def cmd_bench(args, out) -> int:
    directory = Path(args.directory) if args.directory else corpus_dir()
    files = corpus_files(directory)
    if not files:
        raise InputError(f"{directory}: no .ada files")
    exp_path = Path(args.expected) if args.expected else directory / "expected.tsv"
    expected = load_expected(exp_path) if exp_path.exists() else {}
    methods = tuple(m.strip() for m in args.methods.split(","))
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m}")
    try:
        for p in files:
            load_automaton(p)
    except AdaError as e:
        raise InputError(f"{p}:{e.line}:{e.col}: error[{e.code}]: {e.msg}") from None
    t = time.perf_counter()
    rows = run_bench(files, methods, parse_budget(args.budget), expected, args.jobs)
    total = time.perf_counter() - t
    out.write(format_bench(rows, methods))
    bad = [r.name for r in rows if not r.matches()]
    checked = sum(1 for r in rows if r.expected is not None)
    print(f"# {len(rows)} automata, {checked} with expected verdicts, "
          f"{len(bad)} mismatches, total {total:.1f}s", file=out)
    for n in bad:
        print(f"# mismatch: {n}", file=out)
    return EXIT_NO if bad else EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="altdata", description="Alternating data automata toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def search_opts(p, default_method="impact"):
        p.add_argument("--method", choices=METHODS, default=default_method)
        p.add_argument("--bound", type=int, default=6, help="length bound for --method oracle")
        p.add_argument("--budget", default=None, metavar="nodes=N,calls=N,time=S")
        p.add_argument("--strategy", choices=("proof", "exact"), default="proof",
                       help="interpolant source: refutation proofs or exact projection")

    p = sub.add_parser("check", help="decide emptiness of an automaton")
    p.add_argument("automaton")
    search_opts(p)
    p.add_argument("--trace", default=None, help="write line-delimited JSON search records here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("member", help="test whether a data word is accepted")
    p.add_argument("automaton")
    p.add_argument("word", help="TSV word file")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("op", help="boolean operations, printing the result as .ada")
    p.add_argument("operation", choices=("union", "intersect", "complement"))
    p.add_argument("automata", nargs="+")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("include", help="decide L(A) included in L(B)")
    p.add_argument("left")
    p.add_argument("right")
    search_opts(p)
    p.set_defaults(func=cmd_include)

    p = sub.add_parser("bench", help="run emptiness checks over a directory of .ada files")
    p.add_argument("directory", nargs="?", default=None, help="defaults to the bundled corpus")
    p.add_argument("--methods", default="impact,predabs")
    p.add_argument("--expected", default=None, help="expected verdicts (default: DIR/expected.tsv)")
    p.add_argument("--budget", default=None, metavar="nodes=N,calls=N,time=S")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        if getattr(args, "budget", None):
            parse_budget(args.budget)
        return args.func(args, out)
    except argparse.ArgumentTypeError as e:
        print(f"altdata: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"altdata: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
