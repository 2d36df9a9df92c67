"""One test per acceptance criterion; each prints a PASS/FAIL line (see ``pytest -s``)."""

import pytest

from ordered_turan.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid, capsys):
    result = run_criterion(cid)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.failures[:5]
    assert result.in_time, f"took {result.seconds:.1f}s, limit {result.limit}s"
