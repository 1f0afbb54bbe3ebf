from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from freeprod.graphcore import make_standard
from freeprod.transforms import Distribution, JacobiParams, jacobi_to_moments

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FINITE_NAMES = [("Z2",), ("K", 1), ("K", 2), ("K", 3), ("F", 2), ("F", 3), ("P", 3), ("P", 4)]
SMALL_NAMES = [("Z2",), ("K", 2), ("F", 2), ("P", 3)]


def graph_of(spec):
    return make_standard(*spec)


finite_graphs = st.sampled_from(FINITE_NAMES).map(graph_of)
small_graphs = st.sampled_from(SMALL_NAMES).map(graph_of)

small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=5)
positive_fracs = st.fractions(min_value=Fraction(1, 5), max_value=4, max_denominator=5)


@st.composite
def jacobi_laws(draw, length: int = 7, order: int = 12):
    """Random probability laws with rational moments, via random Jacobi parameters."""
    alpha = draw(st.lists(small_fracs, min_size=length, max_size=length))
    omega = draw(st.lists(positive_fracs, min_size=length, max_size=length))
    return jacobi_to_moments(JacobiParams(tuple(alpha), tuple(omega)), order)


@pytest.fixture
def bernoulli():
    return Distribution([1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1])


@pytest.fixture
def semicircle():
    return Distribution([1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42, 0, 132])


@pytest.fixture
def delta0():
    return Distribution([1] + [0] * 12)


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
