import numpy as np
import pytest

from rmwiretap.binmat import BinMatrix, gf2_rank

RM33_REFERENCE = """\
11111111
00001111
00110011
01010101
00000011
00000101
00010001
00000001"""

TABLE1 = {
    "00": ["0000", "1101", "0011", "1110"],
    "01": ["1100", "0001", "1111", "0010"],
    "10": ["0111", "1010", "0100", "1001"],
    "11": ["1011", "0110", "1000", "0101"],
}


@pytest.fixture
def rm33_reference():
    return BinMatrix.from_text(RM33_REFERENCE)


def random_full_rank(rng, n):
    while True:
        a = BinMatrix(rng.integers(0, 2, size=(n, n)))
        if gf2_rank(a) == n:
            return a


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def report():
    """Record one acceptance line: ``report(number, passed, detail)``."""

    def _report(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
