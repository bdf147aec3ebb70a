import pytest

from ssepdual.ssep_model import BoundaryRates

# (1,1,0,0) puts a zero of r_n at n = -2, inside the window for N >= 2.
# Nearby generic rates stand in wherever G itself is needed at N >= 2.
SYMMETRIC = BoundaryRates(1.0, 1.0, 0.0, 0.0)
NEAR_SYMMETRIC = BoundaryRates(1.0, 1.0, 0.1, 0.2)
ASYMMETRIC = BoundaryRates(2.0, 1.0, 0.5, 1.0)
MIXED = BoundaryRates(0.3, 1.7, 1.1, 0.4)


@pytest.fixture(params=[NEAR_SYMMETRIC, ASYMMETRIC, MIXED], ids=["near_sym", "asym", "mixed"])
def rates(request):
    return request.param


# one summary line per acceptance criterion, echoed after the test run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
