from __future__ import annotations

import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from molskit.isometry import IsoElement
from molskit.perm import Permutation

# property suites run at least 10^3 cases each
settings.register_profile(
    "default", max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("quick", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def perms(draw, degree=None, min_degree=1, max_degree=9):
    n = draw(st.integers(min_degree, max_degree)) if degree is None else degree
    return Permutation(tuple(draw(st.permutations(range(n)))))


@st.composite
def perm_pairs(draw, min_degree=1, max_degree=9):
    n = draw(st.integers(min_degree, max_degree))
    return draw(perms(degree=n)), draw(perms(degree=n))


@st.composite
def iso_elements(draw, n):
    b1 = draw(perms(degree=n))
    b2 = draw(perms(degree=n))
    swap = draw(st.booleans())
    return IsoElement.from_blocks(b1, b2, swap)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
