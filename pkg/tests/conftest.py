from fractions import Fraction

import mpmath
import pytest
from hypothesis import settings

from madcantor.config import ConstructionConfig
from madcantor.geometry import Cube

mpmath.mp.dps = 200

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def mp(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def unit_square_config(gamma=(0,), R=4, c=Fraction(1, 100), **kw):
    """(m, n) = (1, 2) on C = [1/4, 3/4]^2."""
    cube = Cube(((Fraction(1, 4), Fraction(1, 4)),), Fraction(1, 2))
    return ConstructionConfig(1, 2, cube, gamma, c, R, **kw)


@pytest.fixture
def square_config():
    return unit_square_config


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Append a one-line acceptance verdict; all lines are echoed in the terminal summary."""

    def _record(label, passed, detail=""):
        line = f"{label}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
