import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sidonlab.ntheory import sieve_primes  # noqa: E402


@pytest.fixture(scope="session")
def table():
    """Shared table covering the whole desk grid."""
    return sieve_primes(100_000)


_CRITERIA: dict[str, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not report.failed:
        return
    for key in report.keywords:
        if key.startswith("criterion_"):
            _CRITERIA.setdefault(key, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split("_")[1])):
        ok = all(_CRITERIA[key])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key.replace('_', ' ', 1)}")
