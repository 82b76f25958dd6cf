import contextlib
import time

import pytest

_KEY = pytest.StashKey[list]()


class _Record:
    detail = ""


@pytest.fixture
def acceptance(request):
    """Context manager that logs one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(_KEY, [])

    @contextlib.contextmanager
    def criterion(number: int, title: str):
        rec = _Record()
        t0 = time.perf_counter()
        ok = False
        try:
            yield rec
            ok = True
        finally:
            dt = time.perf_counter() - t0
            line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}  ({dt:.1f} s){'  ' + rec.detail if rec.detail else ''}"
            lines.append((number, line))
            print(line)

    return criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
