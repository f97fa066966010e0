import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cylou import DiagonalSeries, PowerLog, RngState, SimConfig, SpectralModel, SymmetricStable

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid, text = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE[cid] = (rep.outcome.upper() if rep.outcome != "passed" else "PASS", text)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[1:])):
        status, text = _ACCEPTANCE[cid]
        status = "FAIL" if status == "FAILED" else status
        terminalreporter.write_line(f"{cid:<4} {status:<5} {text}")


def a5_model(n=10):
    law = PowerLog(1.0, 2.0)
    return SpectralModel(tuple(float(k * k) for k in range(1, n + 1)), growth_law=law)


def a5_noise(n=10):
    return DiagonalSeries(tuple(SymmetricStable(1.5, 1.0) for _ in range(n)))


@pytest.fixture(scope="session")
def a5_instance():
    return a5_model(), a5_noise()


@pytest.fixture(scope="session")
def a5_ensemble(a5_instance):
    from cylou import simulate_ensemble
    model, noise = a5_instance
    cfg = SimConfig(100_000, 10.0, 10.0, [10.0], RngState(20240611, 0))
    return simulate_ensemble(model, noise, cfg)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=12345))
