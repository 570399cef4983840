from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def documents():
    from stakeflow import parse_corpus

    return list(parse_corpus(FIXTURES / "docs.jsonl"))


@pytest.fixture(scope="session")
def ontology():
    from stakeflow import default_ontology

    return default_ontology()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per end-to-end acceptance check."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.section("acceptance checks")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{outcome:6s} {name}")
