"""Acceptance criteria, one printed line each.

Every criterion is a group of exact checks from the check suite (tolerance
0).  Run with `pytest -s tests/test_acceptance.py` to see the lines.
"""

import pytest

from anticanon_lab import cli

CRITERIA = {
    1: ("cycle enumeration", ["cycles.k6-strings", "cycles.k6-h0-anticanonical", "cycles.even-lengths"]),
    2: ("h0 table", ["linsys.h0.", "linsys.h0-2F-values"]),
    3: ("oracle agreement", ["linsys.oracle.", "linsys.toric."]),
    4: ("lattice spot values", ["picard.square-and-genus", "picard.twist-against-C1", "linsys.special."]),
    5: ("threefold products", ["threefold.nc.", ".path-independence"]),
    6: ("elimination reports", [".stage1", ".stage2", ".half", ".base-curves", ".free"]),
    7: ("image profiles", ["threefold.I.images", "threefold.I.conics", ".distinct-lines", ".plane"]),
    8: ("branch combinatorics", [".incidence", "branch.selection.", "branch.relation."]),
    9: ("quartic validation", [".quartic"]),
    10: ("quadric dimension counts", [".quadrics.", ".containment"]),
    11: ("moduli", ["moduli."]),
}

# type IV leaves 1 quadric where >= 5 are required; see the decisions ledger
KNOWN_FAILING = {10}


@pytest.fixture(scope="module")
def suite():
    return cli.build_suite()


def _run(suite, n):
    keys = CRITERIA[n][1]
    picked = [sp for sp in suite if any(k in sp.id for k in keys)]
    assert picked, f"criterion {n} selects no checks"
    return [sp.run(0) for sp in picked]


@pytest.mark.parametrize("n", [
    pytest.param(n, marks=pytest.mark.xfail(strict=True, reason="type IV quadric count is 1, not >= 5"))
    if n in KNOWN_FAILING else n
    for n in CRITERIA
])
def test_criterion(suite, n, capsys):
    results = _run(suite, n)
    bad = [r for r in results if not r.passed]
    line = f"criterion {n:>2} ({CRITERIA[n][0]}): {'PASS' if not bad else 'FAIL'}  " \
           f"{len(results) - len(bad)}/{len(results)} checks"
    for r in bad:
        line += f"\n    {r.id}: expected {r.expected}, computed {r.computed}"
    with capsys.disabled():
        print("\n" + line)
    assert not bad
