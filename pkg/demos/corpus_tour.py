"""Compare both search procedures and the bounded oracle over the corpus.

    python3 demos/corpus_tour.py
"""
from altdata import symbolic as S
from altdata.cli import corpus_files
from altdata.impact import check_emptiness_impact
from altdata.io import load_automaton
from altdata.predabs import check_emptiness_predabs


def main():
    print(f"{'automaton':<16}{'size':>5}  {'predabs':<22}{'impact':<22}oracle(6)")
    for path in corpus_files():
        A = load_automaton(path)
        cells = []
        for check in (check_emptiness_predabs, check_emptiness_impact):
            r = check(A)
            cells.append(f"{r.verdict} n={r.stats.nodes} r={r.stats.refinements}")
        o = S.bounded_oracle(A, 6)
        orc = "none" if o.witness is None else f"|w|={len(o.witness)}"
        print(f"{A.name:<16}{A.size:>5}  {cells[0]:<22}{cells[1]:<22}{orc}")


if __name__ == "__main__":
    main()
