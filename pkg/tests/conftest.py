from fractions import Fraction as F

import pytest

from mbernoulli.arrangement import System
from mbernoulli.polynomials import MultiPoly


def phi_k(k):
    return System(1, ((1,),) * k)


A2 = System(2, ((1, 0), (0, 1), (1, 1)))
B2 = System(2, ((1, 0), (0, 1), (1, 1), (1, -1)))

v1 = MultiPoly.var(0, 2)
v2 = MultiPoly.var(1, 2)
t = MultiPoly.var(0, 1)


def q(*xs):
    return tuple(F(x) for x in xs)


# acceptance reporting ----------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion number and label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or not (rep.when == "call" or rep.failed):
        return
    n, label = m.args
    _, ok = _CRITERIA.get(n, (label, True))
    _CRITERIA[n] = (label, ok and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        label, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {label}")
