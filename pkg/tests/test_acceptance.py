"""Acceptance criteria 1-13 at full instance counts.

Each test prints one PASS/FAIL line with the measured quantities, then
asserts the criterion.  Runtime is a few minutes in total.
"""
import pytest

from zetasize.suites import SUITES

ORDER = ["anchor", "uniformity", "merging", "lemmas", "discriminants", "torus", "sampling",
         "two_root", "regularization", "lct", "stability", "distfn", "exactness"]


@pytest.mark.slow
@pytest.mark.parametrize("name", ORDER, ids=[f"{i:02d}-{n}" for i, n in enumerate(ORDER, 1)])
def test_criterion(name, capsys):
    result = SUITES[name](seed=0, scale=1.0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.summary
