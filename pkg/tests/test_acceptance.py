"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
"""

import pytest

from cosmobounds.verify import CHECKS, DEFAULT_SEED

# read by the terminal summary hook in conftest.py
RESULT_LINES = []


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__.removeprefix("check_") for c in CHECKS])
def test_criterion(check):
    result = check(DEFAULT_SEED)
    print(result.line())
    RESULT_LINES.append(result.line())
    assert result.passed, result.line()
