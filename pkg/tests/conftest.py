from __future__ import annotations

import pytest

from prime_intervals._rigor import working_precision
from prime_intervals.zeros import load_fixture


@pytest.fixture(scope="session")
def fixture_zeros():
    return load_fixture()


@pytest.fixture
def prec256():
    with working_precision(256):
        yield 256


@pytest.fixture
def three_zero_file(tmp_path):
    p = tmp_path / "three.txt"
    p.write_text("14.134725\n21.022040\n25.010858\n")
    return p


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
