import pytest

from sngame import kernels
from sngame.gadgets import gen_triangle_no_ne
from sngame.space import StateSpace

# (criterion, passed, message) lines collected by the acceptance suite
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger JIT compilation once so timed sections measure analysis only."""
    net = gen_triangle_no_ne()
    space = StateSpace(net)
    kernels.scan(space)
    for mode in (kernels.IMPROVE, kernels.BEST):
        indptr, succ, player = kernels.edges(space, mode)
        kernels.peel(indptr, succ)
        term = indptr[1:] == indptr[:-1]
        kernels.reach(indptr, succ, term)
        kernels.attractor(indptr, succ, player, term)
        kernels.longest(indptr, succ)
    return True


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, msg in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {msg}")
