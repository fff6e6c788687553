from fractions import Fraction

import pytest
from hypothesis import settings

from probeq import OutcomeBounds, SimpleRV
from probeq.generators import e3_pair
from probeq.scalar import SQRT2

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

BOUNDS = OutcomeBounds(0, 100)
H = SQRT2 / 2


def rv(*triples):
    return SimpleRV.from_intervals(triples, BOUNDS)


@pytest.fixture
def e1():
    return rv((0, Fraction(1, 2), 10), (Fraction(1, 2), 1, 20)), rv((0, Fraction(1, 2), 20), (Fraction(1, 2), 1, 10))


@pytest.fixture
def e2():
    return (rv((0, Fraction(1, 3), 10), (Fraction(1, 3), 1, 20)),
            rv((0, Fraction(2, 3), 20), (Fraction(2, 3), 1, 10)))


@pytest.fixture
def e3():
    return e3_pair()


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
