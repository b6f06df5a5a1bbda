"""Session-wide fixtures for the expensive shared objects.

The large grid and its condenser schedules are the slowest pieces of
the suite; building them once keeps the whole run inside the runtime
budget.
"""

from __future__ import annotations

import pytest

from mms.graph_space import grid_graph, halfline_graph
from mms.modulus import condenser_sequence
from mms.polar import standard_suite


@pytest.fixture(scope="session")
def grid64():
    return grid_graph(2, 64)


@pytest.fixture(scope="session")
def halfline1200():
    return halfline_graph(1200)


@pytest.fixture(scope="session")
def grid64_p2_schedule(grid64):
    return condenser_sequence(grid64, 2.0, (4.0, 8.0, 16.0, 32.0, 60.0),
                              value_rtol=1e-3)


@pytest.fixture(scope="session")
def grid64_p15_schedule(grid64):
    return condenser_sequence(grid64, 1.5, (4.0, 8.0, 16.0, 32.0),
                              value_rtol=1e-3)


@pytest.fixture(scope="session")
def spherical2_suite():
    return standard_suite("spherical2")
