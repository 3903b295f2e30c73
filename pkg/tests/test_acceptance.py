"""Exit criteria at their stated sizes and tolerances; prints one PASS/FAIL line each."""

from __future__ import annotations

import pytest

from risauth.acceptance import CHECKS, run_check

pytestmark = pytest.mark.acceptance


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
