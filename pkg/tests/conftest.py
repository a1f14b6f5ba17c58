import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prelambda.reproduce import TABLE_1, TABLE_4  # noqa: E402
from prelambda.tables import ContingencyTable, ProbabilityTable, normalize  # noqa: E402

from acceptance_log import ACCEPTANCE_LINES  # noqa: E402


@pytest.fixture
def table_1():
    return {k: ProbabilityTable(v) for k, v in TABLE_1.items()}


@pytest.fixture
def table_4_counts():
    return ContingencyTable(TABLE_4)


@pytest.fixture
def table_4_p(table_4_counts):
    return normalize(table_4_counts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
