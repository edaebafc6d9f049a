import pytest
from hypothesis import HealthCheck, settings

from dglab.fixtures import load, resolve

settings.register_profile(
    "exact",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


@pytest.fixture
def fixture():
    """Load a bundled fixture by name."""
    return lambda name: load(resolve(name))


@pytest.fixture
def record_criterion(request):
    """Record one acceptance verdict; all of them are listed at the end."""
    log = request.config.__dict__.setdefault("_acceptance", {})

    def record(number, failures, detail=""):
        status = "PASS" if not failures else "FAIL"
        log[number] = f"criterion {number}: {status}  {detail}".rstrip()
        if failures:
            log[number] += f"  first failure: {failures[0]}"
        return not failures

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.__dict__.get("_acceptance")
    if log:
        terminalreporter.section("acceptance criteria")
        for k in sorted(log):
            terminalreporter.write_line(log[k])
