import json
from functools import lru_cache
from importlib import resources

import pytest

from tbcode.code_builder import build_code, parse_spec

GOLDEN = json.loads((resources.files("tbcode") / "data" / "golden.json").read_text())
ROWS = {r["id"]: r for r in GOLDEN["rows"]}

# acceptance outcomes (criterion, ok, detail); sub-checks of one criterion share a name
OUTCOMES: list[tuple[str, bool, str]] = []


@lru_cache(maxsize=None)
def code_for(row_id: str, with_logicals: bool = False):
    return build_code(parse_spec(ROWS[row_id]["spec"]), with_logicals=with_logicals)


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


def pytest_terminal_summary(terminalreporter):
    if not OUTCOMES:
        return
    merged: dict[str, list[tuple[bool, str]]] = {}
    for name, ok, detail in OUTCOMES:
        merged.setdefault(name, []).append((ok, detail))
    terminalreporter.section("acceptance criteria")
    for name in sorted(merged, key=lambda s: int(s[1:])):
        parts = merged[name]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{name:<4} {'PASS' if ok else 'FAIL'}  {detail}")
