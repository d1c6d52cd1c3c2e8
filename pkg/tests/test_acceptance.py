"""Acceptance criteria at their stated tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion with the measured values.
"""
import pytest

from influence_frag.verify import CRITERIA, root_label_check

NAMES = [f"criterion_{i}" for i in range(1, len(CRITERIA) + 1)]


def report(result):
    print()
    print(result.line())
    return result


@pytest.mark.parametrize("criterion", CRITERIA, ids=NAMES)
def test_criterion(criterion):
    result = report(criterion(level="full", threads=1))
    assert result.passed, result.line()


def test_root_label_uniformity():
    result = report(root_label_check())
    assert result.passed, result.line()
