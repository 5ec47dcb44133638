"""Shared helpers and the acceptance-summary terminal hook."""

import pytest

from emtopo import ModelParams, equilibrium_state
from emtopo.grid import BoundarySpec

# (number, label, ok, detail) rows collected by the acceptance tests.
# Recording happens before the asserts so failing criteria still print.
ACCEPTANCE = []


def record_criterion(num, label, ok, detail=""):
    ACCEPTANCE.append((int(num), label, bool(ok), detail))


@pytest.fixture
def record():
    return record_criterion


def equilibrium_bc(params=None):
    """All six faces Dirichlet-pinned to the kinetics fixed point."""
    u_eq, v_eq = equilibrium_state(params or ModelParams())
    return BoundarySpec.all_dirichlet({"u": float(u_eq), "v": float(v_eq)})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        line = "criterion %d %s  %s" % (num, "PASS" if ok else "FAIL", label)
        if detail:
            line += "  [%s]" % detail
        terminalreporter.write_line(line)
