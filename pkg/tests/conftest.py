import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def record(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion:>2}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        def key(line):
            label = line.split("criterion")[1].split(":")[0].strip()
            num, rest = re.match(r"(\d+)(.*)", label).groups()
            return int(num), rest

        for line in sorted(ACCEPTANCE_LINES, key=key):
            terminalreporter.write_line(line)
