import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from careercutoff import Primitives  # noqa: E402


@pytest.fixture
def ref():
    return Primitives()


@pytest.fixture
def ref_b():
    # reference defaults with a success bonus; interior cutoffs at every rho
    return Primitives(b=0.5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
