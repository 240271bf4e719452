import math

import numpy as np
import pytest

from heunsym.fuchsian import SymmetricHeunConfig

# criterion number -> (passed, detail); filled from tests marked with criterion(n)
ACCEPTANCE = {}
N_CRITERIA = 12


def random_circular_configs(n=20, seed=42):
    """Canonical circular configs: phi away from the point collisions at 0 and pi/2,
    real chi in (0, pi/2), complex lambda with |lambda| <= 5."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        phi = rng.uniform(0.2, math.pi / 2 - 0.2)
        chis = rng.uniform(0.0, math.pi / 2, size=4)
        lam = 5 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        out.append(SymmetricHeunConfig.canonical(phi, tuple(chis), lam))
    return out


@pytest.fixture(scope="session")
def circular_configs():
    return random_circular_configs()


@pytest.fixture
def sample_config():
    return SymmetricHeunConfig.canonical(math.pi / 3, (0.3, 0.5, 0.7, 0.9), 0.4 + 0.1j)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def note(request):
    """Attach a one-line measurement summary to the current acceptance test."""
    notes = []
    request.node.acceptance_notes = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    n = marker.args[0]
    detail = "; ".join(getattr(item, "acceptance_notes", []))
    if report.failed:
        reason = str(call.excinfo.value).splitlines()[0] if call.excinfo else "failed"
        detail = f"{detail}; {reason}" if detail else reason
    ok = report.passed and ACCEPTANCE.get(n, (True, ""))[0]
    prev = ACCEPTANCE.get(n, (True, ""))[1]
    ACCEPTANCE[n] = (ok, "; ".join(x for x in (prev, detail) if x))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        if k in ACCEPTANCE:
            ok, detail = ACCEPTANCE[k]
            terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {k:2d}: FAIL  (not run)")
