"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

The checks themselves live in ``blochlab.acceptance`` so that ``blochlab
verify`` runs exactly the same code.
"""

import pytest

from blochlab.acceptance import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=lambda c: c.__name__.replace("check_", "criterion_"))
def test_criterion(check, capsys):
    res = check(fast=False)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
