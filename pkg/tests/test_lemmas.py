import pytest

from cfsm.builtins import get
from cfsm.lemmas import SUITES, check_send_diamond, run_suites


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_holds(name):
    results = run_suites([name])
    assert results
    for r in results:
        assert r.holds, r.line()


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites(["no-such-suite"])


def test_line_format():
    r = check_send_diamond(get("genest-sync").value)
    assert r.line().startswith("PASS send-diamond")
    assert r.checked > 0
