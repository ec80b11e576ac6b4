"""Shared test plumbing: the acceptance summary table.

Acceptance tests record one verdict per criterion; the hook below prints
them as a single block at the end of the run so the pass/fail state of
every criterion is visible regardless of capture settings.
"""
from __future__ import annotations

_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str = "") -> bool:
    _CRITERIA[number] = (bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {n:2d}: {verdict}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
