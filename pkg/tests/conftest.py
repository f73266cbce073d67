import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quantopos.bridge import build_context_poset
from quantopos.classical import ObservableSet
from quantopos.presheaf import Presheaf, Subobject

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

HALF_PI = math.pi / 2
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def f1_obs():
    return ObservableSet.from_pairs([("z", np.diag([HALF_PI, -HALF_PI]))])


def f3_obs():
    return ObservableSet.from_pairs([("x", HALF_PI * SIGMA_X), ("z", HALF_PI * SIGMA_Z)])


def f4_obs():
    return ObservableSet.from_pairs([("z", np.diag([HALF_PI, -HALF_PI])), ("zp", np.diag([math.pi / 3, -math.pi / 3]))])


@pytest.fixture(scope="session")
def F1():
    obs = f1_obs()
    return obs, build_context_poset(obs)


@pytest.fixture(scope="session")
def F2():
    obs = f1_obs()
    return obs, build_context_poset(obs, [("A_x", [SIGMA_X])])


@pytest.fixture(scope="session")
def F3():
    obs = f3_obs()
    return obs, build_context_poset(obs)


@pytest.fixture(scope="session")
def F4():
    obs = f4_obs()
    return obs, build_context_poset(obs)


@pytest.fixture(scope="session")
def cp2(F2):
    return F2[1]


@pytest.fixture(scope="session")
def Q2(cp2):
    return Presheaf.from_covers(cp2.poset, [["p"], ["d"], ["q1", "q2"]],
                                {("CI", "phi{z}"): "p", ("CI", "A_x"): "p"})


@pytest.fixture(scope="session")
def P2(cp2):
    return Presheaf.from_covers(cp2.classical_poset, [["u"], ["v1", "v2"]], {("{}", "{z}"): "u"})


@pytest.fixture(scope="session")
def S2(Q2):
    return Subobject.from_labels(Q2, [["p"], ["d"], []])


@pytest.fixture(scope="session")
def T2(Q2):
    return Subobject.from_labels(Q2, [["p"], [], ["q1"]])


#: (criterion number, passed, detail) lines collected by the acceptance tests
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
