"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import subprocess
import sys
import time

import pytest

from indefgeom import acceptance

SEED = 0

CRITERIA = [
    (1, "symmetries"),
    (2, "anchors"),
    (3, "operators"),
    (4, "conformal"),
    (5, "quasi_constant"),
    (6, "kn_star"),
    (7, "kaehler"),
    (8, "constant_hol"),
    (9, "null_cone"),
    (10, "limits"),
    (11, "preservation"),
    (12, "identities"),
]


def report(capsys, number, name, passed, detail):
    with capsys.disabled():
        print(f"\n[criterion {number:2d}] {name:<15} {'PASS' if passed else 'FAIL'}  {detail}")


def _summary(result):
    parts = []
    for c in result.checks:
        parts.append(f"{c.name}={c.value:.3g} ({c.relation} {c.threshold:g})")
    return "; ".join(parts)


@pytest.mark.parametrize("number, suite", CRITERIA, ids=[s for _, s in CRITERIA])
def test_criterion(capsys, number, suite):
    t0 = time.perf_counter()
    result = acceptance.SUITES[suite](SEED)
    elapsed = time.perf_counter() - t0
    report(capsys, number, suite, result.passed, f"{elapsed:.2f}s  {_summary(result)}")
    failing = [c for c in result.checks if not c.passed]
    assert result.passed, failing


def test_criterion_13_determinism(capsys):
    # separate interpreters so no cached state is shared between the runs
    argv = [sys.executable, "-m", "indefgeom", "verify", "--suite", "all", "--json", "--seed", str(SEED)]
    runs = [subprocess.run(argv, capture_output=True, check=False) for _ in range(2)]
    codes = [r.returncode for r in runs]
    outputs = [r.stdout for r in runs]
    same = outputs[0] == outputs[1]
    report(capsys, 13, "determinism", same and codes == [0, 0],
           f"exit codes {codes}, {len(outputs[0])} bytes, identical={same}")
    assert codes == [0, 0]
    assert same


def test_all_suites_within_budget():
    t0 = time.perf_counter()
    results = acceptance.run_suites(seed=SEED)
    assert len(results) >= 12
    assert all(r.passed for r in results)
    assert time.perf_counter() - t0 < 60.0
