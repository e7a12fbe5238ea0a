import random

import pytest
from hypothesis import strategies as st

from freesep import stallings
from freesep.words import Alphabet, Letter, Word, nonseparable_subgroup_generators, reduce

F2 = Alphabet(2)


def letters(rank=2):
    return st.tuples(st.integers(0, rank - 1), st.sampled_from([1, -1])).map(lambda t: Letter(*t))


def raw_words(rank=2, max_size=12):
    return st.lists(letters(rank), max_size=max_size)


def words(rank=2, max_size=12):
    return raw_words(rank, max_size).map(reduce)


def random_word(rng: random.Random, rank: int, max_len: int) -> Word:
    return reduce(Letter(rng.randrange(rank), rng.choice((1, -1))) for _ in range(rng.randint(0, max_len)))


@pytest.fixture(scope="session")
def h_gens():
    return nonseparable_subgroup_generators(F2)


@pytest.fixture(scope="session")
def h_graph(h_gens):
    return stallings.build(h_gens, rank=2)


@pytest.fixture
def parse():
    return F2.parse


_ACCEPTANCE: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome.upper(), report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, dur in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}  ({dur:.2f}s)")
