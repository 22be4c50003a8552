"""Acceptance gate: one test per criterion, each printing its pass/fail line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines,
or `curvlab selftest` for the CSV/manifest form of the same suite.
"""

import time

import pytest

from curvlab import acceptance

_RESULTS = {}
_T0 = time.time()


def _run(criterion_fn):
    res = criterion_fn()
    _RESULTS[res.crit_id] = res
    print()
    print(res.line())
    for key, val in res.details.items():
        print(f"        {key} = {val}")
    assert res.passed, f"criterion {res.crit_id} failed: {res.details}"


@pytest.mark.parametrize("fn", acceptance.CRITERIA,
                         ids=[f"criterion_{i + 1:02d}" for i in range(len(acceptance.CRITERIA))])
def test_criterion(fn):
    _run(fn)


def test_total_wall_clock_under_five_minutes():
    assert len(_RESULTS) == len(acceptance.CRITERIA), "criteria must run first"
    total = sum(r.elapsed_s for r in _RESULTS.values())
    print(f"\n        acceptance suite total: {total:.1f}s (budget 300s)")
    assert total < 300.0
