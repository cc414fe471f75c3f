import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gstrand.closures import (  # noqa: E402
    ClosureParamsSE3,
    ClosureParamsSO3,
    ClosureParamsSO4Ex1,
    ClosureParamsSO4Ex2,
    PolySpec,
    SMKParams,
)
from gstrand.grid import GridSpec  # noqa: E402
from gstrand.state import StrandState  # noqa: E402

FAMILIES = ("so3", "so4_ex1", "so4_ex2", "se3")


def random_params(kind, rng):
    v = lambda: rng.normal(size=3)  # noqa: E731
    poly = PolySpec(tuple(0.3 * rng.normal(size=4)))
    if kind == "so3":
        return ClosureParamsSO3(v(), 0.5 * rng.normal(), 0.5 * rng.normal(), poly)
    if kind == "so4_ex1":
        return ClosureParamsSO4Ex1(v(), v(), 0.5 * rng.normal(), 0.5 * rng.normal(), poly)
    if kind == "so4_ex2":
        return ClosureParamsSO4Ex2(v(), v(), 0.5 * rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal())
    if kind == "se3":
        return ClosureParamsSE3(v(), v(), 0.5 * rng.normal(), 0.5 * rng.normal(), poly)
    if kind == "smk":
        J = rng.normal(size=(3, 3))
        K1 = rng.normal(size=(3, 3))
        K2 = rng.normal(size=(3, 3))
        return SMKParams(J=J @ J.T + np.eye(3), K_Gamma=K1 @ K1.T, K_Omega=K2 @ K2.T, Gamma_ref=v(), Omega_ref=v())
    raise ValueError(kind)


def random_state(group, rng, n=32, length=2 * np.pi, amp=0.5, kmax=3):
    return StrandState.random(group, GridSpec(n, length), rng, kmax=kmax, amp=amp)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
