from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import strategies as st

from corepool.workload import workload_from_utils

# Acceptance lines collected during the run and echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def set_partitions(items):
    """Yield every partition of ``items`` into non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def enumerate_min_cores(sdr, sdn_total):
    """Reference optimum by plain enumeration of all SDR partitions."""
    total = math.fsum(sdr) + sdn_total
    need = math.ceil(total / 100 - 1e-9) if total > 1e-9 else 0
    best = None
    for part in set_partitions(list(sdr)):
        if all(math.fsum(b) <= 100 + 1e-9 for b in part):
            k = max(len(part), need)
            best = k if best is None else min(best, k)
    return best


utilization = st.floats(min_value=0.5, max_value=100.0, allow_nan=False)


@st.composite
def workloads(draw, max_sdr=12, max_sdn=12):
    sdr = draw(st.lists(utilization, max_size=max_sdr))
    sdn = draw(st.lists(utilization, max_size=max_sdn))
    return workload_from_utils(sdr, sdn)


@pytest.fixture
def small_workload():
    return workload_from_utils([60, 60], [25, 35])
