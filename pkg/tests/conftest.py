"""Shared fixtures.

The expensive objects here are exact count tables.  They are module-agnostic
and read-only, so everything is session-scoped and built once; individual
tests must not mutate them.  Sparse tables keep only the rows the tests
actually read, which is what keeps the big-n fixtures cheap.
"""

import pytest

from urnlab import (
    HistoryTable,
    LogHistoryTable,
    UrnSpec,
    build_history_table,
    build_log_table,
)


@pytest.fixture(scope="session")
def urn11() -> UrnSpec:
    return UrnSpec(1, 1, 0, 1)


@pytest.fixture(scope="session")
def urn32() -> UrnSpec:
    return UrnSpec(3, 2, 0, 1)


@pytest.fixture(scope="session")
def dense11(urn11) -> HistoryTable:
    # Every row up to 35: enough for series checks and small-n contours.
    return build_history_table(urn11, 35)


@pytest.fixture(scope="session")
def dense32(urn32) -> HistoryTable:
    return build_history_table(urn32, 35)


@pytest.fixture(scope="session")
def big11(urn11) -> HistoryTable:
    # Sparse: only the rows read by the moment/limit-law ladders.
    keep = {25, 50, 100, 200, 400, 500, 900, 1000}
    return build_history_table(urn11, 1000, keep=keep)


@pytest.fixture(scope="session")
def mid32(urn32) -> HistoryTable:
    return build_history_table(urn32, 400, keep={25, 100, 400})


@pytest.fixture(scope="session")
def log11_1600(urn11) -> LogHistoryTable:
    return build_log_table(urn11, 1600, keep={100, 400, 1600})


@pytest.fixture(scope="session")
def log11_2000(urn11) -> LogHistoryTable:
    return build_log_table(urn11, 2000, keep={500, 1000, 2000})
