import pytest

from monomul.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    res = criterion()
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.line()
