import time

import pytest

from primepartitions import q2_table, q_total_table, qm_table_dp, sieve_upto

# Session-scoped tables: built lazily, shared across files. The large ones
# back the acceptance suite; unit tests mostly use table_2k. Build times of
# the expensive fixtures are recorded so runtime-bounded checks can report
# them no matter which test triggered the build.

BUILD_SECONDS = {}


def _timed(name, builder):
    t0 = time.perf_counter()
    value = builder()
    BUILD_SECONDS[name] = time.perf_counter() - t0
    return value


@pytest.fixture(scope="session")
def table_2k():
    return sieve_upto(2_000)


@pytest.fixture(scope="session")
def table_2e6():
    return sieve_upto(2_000_000)


@pytest.fixture(scope="session")
def conv_1e6(table_2e6):
    # two-part counts for all even sums <= 2e6
    return _timed("conv_1e6", lambda: q2_table(table_2e6, 1_000_000))


@pytest.fixture(scope="session")
def dp3_1e5(table_2e6):
    return _timed("dp3_1e5", lambda: qm_table_dp(table_2e6, 3, 100_000))


@pytest.fixture(scope="session")
def qtotal_1e5(table_2e6):
    return _timed("qtotal_1e5", lambda: q_total_table(table_2e6, 100_000))
