from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from operlab.liealg import LieType, all_types

settings.register_profile("operlab", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("operlab")

ALL_TYPES = [t.name for t in all_types(8)]
SMALL_TYPES = [t.name for t in all_types(4)] + ["G2", "F4"]
SMALL_TYPES = sorted(set(SMALL_TYPES), key=lambda s: (s[0], int(s[1:])))
HIGHER_RANK = [t for t in ALL_TYPES if t != "A1"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_polynomial(rng, degree_terms: int = 3, scale: float = 0.8):
    return tuple(complex(a, b) * scale for a, b in rng.normal(size=(degree_terms, 2)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
