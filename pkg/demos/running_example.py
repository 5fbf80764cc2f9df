"""Walk through emptiness checking on the bundled running example.

    python3 demos/running_example.py
"""
from altdata import symbolic as S
from altdata.automaton import membership
from altdata.cli import read_automaton
from altdata.impact import check_emptiness_impact
from altdata.io import print_automaton, print_word
from altdata.predabs import check_emptiness_predabs
from altdata.search import Tracer


def show_search(A, check):
    tracer = Tracer(keep=True)
    res = check(A, tracer=tracer)
    print(f"  {res.summary()}")
    for rec in tracer.records:
        if rec["phase"] in ("refine", "close", "redirect"):
            extra = {k: v for k, v in rec.items() if k not in ("phase", "digest", "formula", "node", "path")}
            print(f"    {rec['phase']:<8} path={rec['path'] or 'eps':<4} label={rec['formula']}  {extra}")
    return res


def main():
    A = read_automaton("@fig1")
    print(print_automaton(A))
    print("lazy predicate abstraction:")
    show_search(A, check_emptiness_predabs)
    print("in-place label strengthening:")
    show_search(A, check_emptiness_impact)

    B = read_automaton("@fig1_ge")
    print("\nweakening q2's b-rule to >= makes the language nonempty:")
    res = show_search(B, check_emptiness_impact)
    print(print_word(res.witness, B), end="")
    print("  accepted by membership:", membership(B, res.witness))
    orc = S.bounded_oracle(B, 6)
    print("  shortest witness by enumeration has length", len(orc.witness))


if __name__ == "__main__":
    main()
