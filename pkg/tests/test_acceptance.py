"""Acceptance criteria, one test each, at the stated tolerances and runtime budgets.

Every test prints a single ``PASS``/``FAIL`` line (visible under ``pytest -s``
or when run as a script: ``python tests/test_acceptance.py``).
"""

import sys

import pytest

from regimesplit.verify import run_check

# (check name, runtime budget in seconds)
CRITERIA = [
    ("gaussian", 1.0),
    ("two_maxima", 5.0),
    ("hexagon", 0.1),
    ("lemma", 30.0),
    ("monotonicity", 10.0),
    ("weibull", 2.0),
    ("elliptical", 10.0),
    ("montecarlo", 60.0),
    ("oracle", 30.0),
    ("shift", 10.0),
]


def _report(name, budget):
    res = run_check(name)
    ok = res.passed and res.runtime < budget
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance] {status} {name:<13} {res.computed} | expected {res.expected} | {res.runtime:.2f}s (< {budget:g}s)"
    return ok, line, res


@pytest.mark.parametrize("name, budget", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, budget, capsys):
    ok, line, res = _report(name, budget)
    with capsys.disabled():
        print("\n" + line)
    assert res.passed, f"{name}: computed {res.computed}; expected {res.expected}; {res.detail}"
    assert res.runtime < budget, f"{name} took {res.runtime:.2f}s, budget {budget}s"


if __name__ == "__main__":
    results = [_report(name, budget) for name, budget in CRITERIA]
    for _, line, _ in results:
        print(line)
    sys.exit(0 if all(ok for ok, _, _ in results) else 1)
