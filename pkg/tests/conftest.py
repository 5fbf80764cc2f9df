import pytest

from altdata.cli import corpus_dir, corpus_files
from altdata.io import load_automaton

_REPORT: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Log one acceptance line; it is repeated in the terminal summary."""
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    _REPORT.append(line)


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: load_automaton(p) for p in corpus_files()}


@pytest.fixture(scope="session")
def fig1(corpus):
    return corpus["fig1"]


@pytest.fixture(scope="session")
def fig1_ge(corpus):
    return corpus["fig1_ge"]


@pytest.fixture(scope="session")
def cdir():
    return corpus_dir()
