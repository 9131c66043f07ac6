import math
import sys

import pytest
from hypothesis import settings

from algnls.nonlinearity import CubicParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

MONOTONE = CubicParams(1.0, -2.0, 3.0)          # sigma = 4/3
DEGENERATE = CubicParams(2.0, -2.0, 1.0)        # sigma = 2, omega_d = 1/4
WINDOW = CubicParams(1.0, -math.sqrt(33) / 2, 3.0)  # sigma = 11/4
FIXTURES = [MONOTONE, DEGENERATE, WINDOW]
FIXTURE_IDS = ["monotone", "degenerate", "window"]


@pytest.fixture(params=FIXTURES, ids=FIXTURE_IDS)
def params(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
