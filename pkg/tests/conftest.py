import time

import pytest
from hypothesis import settings

settings.register_profile("vproof", deadline=None, max_examples=60)
settings.load_profile("vproof")

SESSION_BUDGET_S = 120.0

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
_started = time.perf_counter()


def session_elapsed() -> float:
    return time.perf_counter() - _started


def pytest_collection_modifyitems(items):
    # the budget check must see every other test's cost, so it runs last
    last = [i for i in items if "criterion_7" in i.name]
    items[:] = [i for i in items if i not in last] + last


def pytest_sessionfinish(session, exitstatus):
    if 7 in ACCEPTANCE:
        total = session_elapsed()
        ok = total < SESSION_BUDGET_S
        ACCEPTANCE[7] = (ok and ACCEPTANCE[7][0], f"whole session {total:.1f}s < {SESSION_BUDGET_S:.0f}s")
        if not ok and session.exitstatus == 0:
            session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def corpus_reports():
    """Every corpus entry explored once at default config: name -> (entry, cfg, report)."""
    from vproof import ExploreConfig, explore
    from vproof.corpus import corpus_entries
    from vproof.runner import effective_config

    out = {}
    for entry in corpus_entries():
        cfg = effective_config(entry, ExploreConfig())
        out[entry.name] = (entry, cfg, explore(entry.body, cfg, name=entry.name))
    return out
