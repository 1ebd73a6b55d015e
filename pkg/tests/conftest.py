from __future__ import annotations

import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from codeanomaly.corpus import build_corpus
from codeanomaly.synthetic import generate_corpus

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_corpus():
    return build_corpus(src=str(FIXTURES / "corpus"))


@pytest.fixture(scope="session")
def planted_corpus(tmp_path_factory):
    """5000 template functions plus the 5 planted ones, parsed once per session."""
    t0 = time.perf_counter()
    root = tmp_path_factory.mktemp("planted")
    generated = generate_corpus(5000, seed=0)
    generated.write(root)
    corpus = build_corpus(src=str(root))
    corpus.build_seconds = time.perf_counter() - t0
    return corpus


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion and fail the test on FAIL."""
    def check(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
        print(line)
        request.config._acceptance_lines.append((number, line))
        assert ok, line
    return check


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config._acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(config._acceptance_lines):
            terminalreporter.write_line(line)
