from fractions import Fraction as F

import pytest

from a2wc.parameter_space import NU_GEN, NU_STAR


@pytest.fixture
def nu_star():
    return NU_STAR


@pytest.fixture
def nu_gen():
    return NU_GEN


def sympy_matrix(m):
    import sympy

    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])


def to_fraction(x):
    import sympy

    x = sympy.Rational(x)
    return F(int(x.p), int(x.q))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
