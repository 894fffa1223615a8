import os
import sys
from fractions import Fraction

from hypothesis import settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

P_VALUES = [Fraction(1, 10), Fraction(1, 4), Fraction(1, 3), Fraction(2, 5), Fraction(1, 2)]


@st.composite
def unit_rationals(draw, max_den=2000):
    d = draw(st.integers(1, max_den))
    n = draw(st.integers(0, d))
    return Fraction(n, d)


@st.composite
def biases(draw, upto=Fraction(1, 2)):
    return draw(st.sampled_from([p for p in P_VALUES if p <= upto]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
