"""The thirteen acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line with the measured values,
so ``pytest -v`` output doubles as the acceptance report.
"""
import pytest

from walkcodes.acceptance import CRITERIA, load_fixtures, run_criterion


@pytest.fixture(scope="module")
def fixtures():
    return load_fixtures()


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"c{c.number:02d}-{c.name.replace(' ', '-')}" for c in CRITERIA])
def test_criterion(criterion, fixtures, capsys):
    result = run_criterion(criterion, fixtures)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
