import os

import pytest
from hypothesis import HealthCheck, settings

from ffec.analysis import AnalysisOptions, load_corpus, run_batch

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def corpus_specs():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_run(corpus_specs):
    """Full pipeline over the bundled corpus, computed once per session."""
    return run_batch(corpus_specs, AnalysisOptions())


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {msg}")
