import hypothesis
import pytest

from erasure_duals.fixtures import repeated_e1, two_in_plane
from erasure_duals.frames import canonical_dual, dual_pair, make_frame, random_frame

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def small_frame():
    return make_frame(two_in_plane())


@pytest.fixture
def small_pair(small_frame):
    return canonical_dual(small_frame)


@pytest.fixture(params=[3, 5])
def degenerate_pair(request):
    x, z = repeated_e1(request.param)
    return dual_pair(make_frame(x), z)


def rand_pair(r, n, seed, field="real"):
    return canonical_dual(make_frame(random_frame(r, n, seed, field)))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    name = request.node.name
    notes: list[str] = []
    yield notes
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if notes:
        line += " :: " + "; ".join(notes)
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
