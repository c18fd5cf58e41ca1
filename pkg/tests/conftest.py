import functools

import pytest

from chirpsim.cli import resolve_path, shipped_names
from chirpsim.config import parse_scenario
from chirpsim.runner import run_scenario

SCENARIOS = [n for n in shipped_names() if not n.startswith("gates_")]
CHECK_KINDS = ("conservation", "oracle", "convergence")

# (criterion number, title, passed, detail) filled by test_acceptance
ACCEPTANCE_LOG = {}


@functools.lru_cache(maxsize=None)
def shipped(name):
    return parse_scenario(resolve_path(name))


@functools.lru_cache(maxsize=None)
def shipped_run(name):
    """Full run of a shipped scenario, including its built-in checks (cached per session)."""
    return run_scenario(shipped(name))


def analysis(result, kind, index=0):
    return [a for a in result.analyses if a["kind"] == kind][index]


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LOG


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LOG):
        title, ok, detail = ACCEPTANCE_LOG[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
