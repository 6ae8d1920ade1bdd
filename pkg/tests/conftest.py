import itertools

import pytest
from hypothesis import HealthCheck, settings

from polyprog import builtin_arith, builtin_coin, builtin_sort, parse_value

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def arith():
    return builtin_arith()


@pytest.fixture(scope="session")
def sortprog():
    return builtin_sort()


@pytest.fixture(scope="session")
def coin():
    return builtin_coin()


def nat(program, n):
    return parse_value(str(n), "nat", program.signature)


def lst(program, xs):
    return parse_value("[" + ",".join(map(str, xs)) + "]", "list", program.signature)


def small_lists(max_len, alphabet=(1, 2, 3)):
    for k in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=k)


# ------------------------------------------------------ acceptance report

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    note = ""
    if rep.failed:
        msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else ""
        note = msg.splitlines()[0] if msg else ""
    _CRITERIA[number] = (title, rep.passed, note)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, note = _CRITERIA[number]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        if note:
            line += f"  [{note[:160]}]"
        terminalreporter.write_line(line)
