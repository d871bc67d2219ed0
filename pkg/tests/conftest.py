from importlib import resources

import pytest

from henkin_synth import expr as ex
from henkin_synth.formula import read_dqdimacs
from henkin_synth.sampler import SampleTable

X1, X2, X3, Y1, Y2, Y3 = 1, 2, 3, 4, 5, 6

# three models of the worked example's matrix, columns x1 x2 x3 y1 y2 y3
FIG2_ROWS = [
    (0, 0, 0, 1, 1, 0),
    (0, 0, 1, 1, 1, 1),
    (1, 1, 0, 0, 0, 1),
]


def instance_path(name):
    return str(resources.files("henkin_synth") / "instances" / name)


@pytest.fixture
def example1():
    return read_dqdimacs(instance_path("example1.dqdimacs"))


@pytest.fixture
def limitation():
    return read_dqdimacs(instance_path("limitation.dqdimacs"))


@pytest.fixture
def fig2_table(example1):
    return SampleTable.from_rows(example1.variables, FIG2_ROWS, example1)


@pytest.fixture
def example1_initial():
    """Candidates learned from FIG2_ROWS."""
    return {
        Y1: ex.Not(ex.VarRef(X1)),
        Y2: ex.VarRef(Y1),
        Y3: ex.Or((ex.VarRef(X3), ex.And((ex.Not(ex.VarRef(X3)), ex.VarRef(X2))))),
    }


@pytest.fixture
def example1_repaired(example1_initial):
    return {
        **example1_initial,
        Y2: ex.Or((ex.VarRef(Y1), ex.Not(ex.VarRef(X2)))),
    }


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; the lines are
    echoed immediately and repeated in the terminal summary."""

    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
