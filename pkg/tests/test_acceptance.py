"""Acceptance criteria 1-9, each at its stated tolerance and runtime budget.

The suite runs once per session; every criterion prints a single
``[PASS]`` / ``[FAIL]`` line (visible even under output capture) and is then
asserted as its own test.  Run directly with ``python tests/test_acceptance.py``.
"""
import pytest

from bjapprox.selftest import CRITERIA, run_all


@pytest.fixture(scope="module")
def outcomes():
    return {c.number: c for c in run_all()}


@pytest.mark.parametrize("number", [n for n, *_ in CRITERIA], ids=[f"criterion_{n}" for n, *_ in CRITERIA])
def test_criterion(outcomes, number, capsys):
    c = outcomes[number]
    with capsys.disabled():
        print("\n" + c.line())
    assert c.passed, c.detail


if __name__ == "__main__":
    results = run_all(echo=lambda c: print(c.line(), flush=True))
    raise SystemExit(0 if all(c.passed for c in results) else 1)
