from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from bottypes.maneuvers import LexiconSet
from bottypes.newsbot import train_default_model

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (passed, title, seconds); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str, float]] = {}


@pytest.fixture(scope="session")
def lexicons() -> LexiconSet:
    return LexiconSet.default()


@pytest.fixture(scope="session")
def headline_model():
    return train_default_model(seed=0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {title} ({secs:.2f} s)")
