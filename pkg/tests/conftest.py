import json

import numpy as np
import pytest

from orthmf.lattice import block_gram, find_isotropic_flag, hyperbolic_plane, new_lattice

from oracles import FROZEN

U = hyperbolic_plane()
A2 = [[-2, 1], [1, -2]]


def make_flag(*blocks):
    return find_isotropic_flag(new_lattice(block_gram(U, U, *blocks)))


@pytest.fixture(scope="session")
def frozen():
    return json.loads(FROZEN.read_text())


@pytest.fixture(scope="session")
def flag_a1():
    """2U ⊕ ⟨-2⟩, n = 3."""
    return make_flag([[-2]])


@pytest.fixture(scope="session")
def flag_a2():
    """2U ⊕ A2(-1), n = 4."""
    return make_flag(A2)


@pytest.fixture(scope="session")
def flag_a1a1():
    """2U ⊕ ⟨-2⟩ ⊕ ⟨-2⟩, n = 4."""
    return make_flag([[-2]], [[-2]])


@pytest.fixture(scope="session")
def flag_u2():
    """U(2) ⊕ U ⊕ ⟨-2⟩: a non-unimodular hyperbolic part."""
    return find_isotropic_flag(new_lattice(block_gram([[0, 2], [2, 0]], U, [[-2]])))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# ------------------------------------------------------- acceptance report

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


class Criterion:
    """Collects named checks for one acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures, self.details = [], []

    def check(self, name, ok, detail=""):
        if not ok:
            self.failures.append(name)
        if detail:
            self.details.append(f"{name}: {detail}")
        return ok

    def note(self, text):
        self.details.append(text)

    def line(self, error=None):
        ok = not self.failures and error is None
        tail = f"error: {error}" if error is not None else (
            "failed: " + ", ".join(self.failures) if self.failures else "; ".join(self.details))
        return f"{'PASS' if ok else 'FAIL'}  [{self.number:2d}] {self.title}" + (f"  ({tail})" if tail else "")


@pytest.fixture
def criterion(request):
    """Yield a factory; the PASS/FAIL line is printed and kept for the summary."""
    made = []

    def make(number, title):
        c = Criterion(number, title)
        made.append(c)
        return c

    yield make
    err = None
    rep = getattr(request.node, "rep_call", None)
    crash = getattr(getattr(rep, "longrepr", None), "reprcrash", None)
    if rep is not None and rep.failed and crash is not None:
        err = crash.message.splitlines()[0]
    for c in made:
        line = c.line(None if c.failures else err)
        print(line)
        request.config.stash[_ACCEPTANCE][c.number] = line


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
