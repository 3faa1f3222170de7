import pytest

from hardcore.cutset import break_of, enumerate_omcut
from hardcore.gibbs import Configuration, clamped_vertices
from hardcore.lattice import Box

X = (0, 0)


@pytest.fixture(scope="session")
def box2():
    return Box(2, 2)


@pytest.fixture(scope="session")
def box3():
    return Box(2, 3)


@pytest.fixture(scope="session")
def plus_omega(box2):
    """Odd boundary occupied, the anchor occupied, everything else vacant."""
    return Configuration(box2, clamped_vertices(box2, "odd") | {X})


@pytest.fixture(scope="session")
def plus(plus_omega):
    return break_of(plus_omega, X)


@pytest.fixture(scope="session")
def omcut3(box3):
    return list(enumerate_omcut(box3, X))


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_criteria: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    k, title = mark.args
    entry = _criteria.setdefault(k, [title, True, 0.0])
    entry[1] = entry[1] and report.passed
    entry[2] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        title, ok, secs = _criteria[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f}s)")
