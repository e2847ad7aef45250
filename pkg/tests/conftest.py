import numpy as np
import pytest
from hypothesis import settings

from acs_squeeze.spin import SpinState

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# criterion title -> [(check, passed, detail)]; filled by test_acceptance, summarized at the end of the run
ACCEPTANCE = {}


def record(criterion: str, check: str, passed: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'} [{criterion}] {check} {detail}".rstrip())
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[criterion]
        failed = [f"{name} ({detail})" if detail else name for name, ok, detail in checks if not ok]
        status = "FAIL" if failed else "PASS"
        line = f"{status} {criterion}: {len(checks) - len(failed)}/{len(checks)} checks passed"
        if failed:
            line += "; failed: " + "; ".join(failed)
        terminalreporter.write_line(line)


def random_state(rng: np.random.Generator, two_j: int) -> SpinState:
    """Haar-random pure state."""
    v = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState.normalized(two_j, v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
