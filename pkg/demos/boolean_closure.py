"""Union, intersection, complement and language inclusion.

    python3 demos/boolean_closure.py
"""
from altdata.automaton import complement, intersection, membership, union
from altdata.cli import read_automaton
from altdata.impact import check_emptiness_impact
from altdata.io import parse_word, print_word


def included(A, B):
    """L(A) within L(B) iff A and the complement of B accept nothing in common."""
    res = check_emptiness_impact(intersection(A, complement(B)))
    return res.empty, res.witness


def main():
    A = read_automaton("@fig1")
    B = read_automaton("@fig1_ge")
    C = complement(B)
    print(f"complement keeps the size: {B.size} -> {C.size}")
    w = parse_word("a\t0\t0\nb\t0\t0\n", B)
    for name, M in (("B", B), ("~B", C), ("A|B", union(A, B)), ("A&B", intersection(A, B))):
        print(f"  {name:<4} accepts a(0,0) b(0,0): {membership(M, w)}")
    for left, right, L1, L2 in (("A", "B", A, B), ("B", "A", B, A), ("B", "B", B, B)):
        ok, cex = included(L1, L2)
        print(f"L({left}) within L({right}): {ok}")
        if cex is not None:
            print("  counterexample:", " | ".join(print_word(cex, L1).splitlines()))


if __name__ == "__main__":
    main()
