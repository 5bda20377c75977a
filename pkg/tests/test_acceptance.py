"""One test per acceptance criterion; each prints a PASS/FAIL line with its measurements."""

import pytest

from gowersap.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
