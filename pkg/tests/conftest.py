import numpy as np
import pytest

import ngrc
from ngrc.dynamics import IntegratorId, SystemId


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # Expose each phase's report on the item so the acceptance module can
    # print one PASS/FAIL line per criterion.
    outcome = yield
    report = outcome.get_result()
    setattr(item, "rep_" + report.when, report)


@pytest.fixture(scope="session")
def lorenz_short():
    """Normalized Euler Lorenz segment: reference training config plus headroom."""
    traj = ngrc.generate(SystemId.LORENZ63, IntegratorId.EULER, 1, 0.01, 700)
    return ngrc.normalize(traj)


@pytest.fixture(scope="session")
def lorenz_k2():
    """Normalized Euler Lorenz segment long enough for k=2, n_train=5000."""
    traj = ngrc.generate(SystemId.LORENZ63, IntegratorId.EULER, 1, 0.01, 5200)
    return ngrc.normalize(traj)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
