import math
import sys

import numpy as np
import pytest

from minimaxdl.model import random_dictionary
from minimaxdl.packing import build_ensemble
from minimaxdl.seeding import derived_rng

R_MAX_10 = 2 * math.sqrt(10)


@pytest.fixture(scope="session")
def d0_6x10():
    return random_dictionary(6, 10, derived_rng(2024, 0))


@pytest.fixture(scope="session")
def ensemble64(d0_6x10):
    """m=6, p=10, eps=1/320 (eps'=1), 64 members."""
    return build_ensemble(d0_6x10, 1 / 320, 64, derived_rng(2024, 1))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
