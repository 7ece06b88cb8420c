import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# numba compiles on first call, which would trip per-example deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")

# criterion -> list of (passed, detail) from its parts
_CRITERIA: dict = {}


@pytest.fixture
def record_criterion():
    def record(key, passed, detail):
        _CRITERIA.setdefault(str(key), []).append((bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} criterion {key}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=int):
        parts = _CRITERIA[key]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
