from __future__ import annotations

import pytest

from rtt_attack.backends import LanguageId
from rtt_attack.builtin import builtin_resources, builtin_suite, corpus_path, load_dataset

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def world():
    """The packaged deterministic world: (suite, resources, corpus, langs)."""
    resources = builtin_resources()
    suite = builtin_suite(resources)
    examples = load_dataset(corpus_path())
    langs = tuple(LanguageId(c) for c in ("es", "de", "fr"))
    return suite, resources, examples, langs


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.when == "call":
            _ACCEPTANCE_RESULTS.append((name, report.outcome))
        elif report.when == "setup" and report.outcome != "passed":
            _ACCEPTANCE_RESULTS.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
