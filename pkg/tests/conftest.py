import re

import pytest

from turankit.recurrence import MONIC, ORTHONORMAL, build_family

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n, name = int(m.group(1)), m.group(2)
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _outcomes.get(n, (name, "PASS"))[1]
    _outcomes[n] = (name, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        name, verdict = _outcomes[n]
        terminalreporter.write_line(f"criterion {n:2d} {verdict}  {name.replace('_', ' ')}")


@pytest.fixture
def hermite_monic():
    return build_family("hermite-monic")


@pytest.fixture
def hermite_orthonormal():
    return build_family("hermite")


@pytest.fixture
def mp_half_pi():
    return build_family("meixner-pollaczek", {"lambda": 1, "phi": "pi/2"}, ORTHONORMAL)


@pytest.fixture
def power_law_111():
    return build_family("power-law", {"r": 1, "s": 1, "gamma": 1}, ORTHONORMAL)


@pytest.fixture
def chebyshev():
    """a = 1, b = 0: zeros of p_k are 2 cos(j pi / (k + 1))."""
    return build_family("hermite-like", {"c": 1, "r": 0}, MONIC)
