import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from alomari.funcspace import Interval  # noqa: E402


@pytest.fixture(params=[(0.0, 1.0), (-2.0, 3.0)], ids=["unit", "wide"])
def iv(request):
    return Interval(*request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = sorted(getattr(mod, "RESULTS", []), key=lambda l: int(l.split()[1].rstrip(":")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
