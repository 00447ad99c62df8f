import random

import pytest

from mergeres.cnf import Clause, CnfFormula

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(12345)


def F(*clauses, num_vars=None):
    return CnfFormula.from_lists([list(c) for c in clauses], num_vars)


def C(*lits):
    return Clause(lits)
