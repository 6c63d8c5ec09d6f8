"""Acceptance criteria on the default d=2, N=128 configuration.

Each criterion prints one PASS/FAIL line in the pytest terminal summary (or
on stdout when this file is run as a script).  A criterion the numerics do
not meet is marked ``xfail(strict=True)`` and still reported as FAIL.
"""

import pytest

from kgchannels.config import ScenarioConfig
from kgchannels.scenario import run_classical, run_quantum
from kgchannels.suite import CRITERIA, criterion_rows

PINNED = {
    "causality": 1e-8,
    "causality_control": 1e-3,
    "antisymmetry": 1e-8,
    "symplectic_chain": 1e-5,
    "jacobian": 1e-6,
    "sigma_invariance": 1e-3,
    "bracket_preservation": 1e-4,
    "channel_locality": 1e-10,
    "no_signaling": 1e-8,
    "signal": 1e-3,
    "convention_lock": 1e-5,
    "rotation_invariance": 1e-6,
    "tn_zero": 1e-10,
    "tn_limit": 0.1,
    "leapfrog": 1e-3,
}
PINNED_COUNTS = {
    "spacelike_pairs": 50,
    "control_pairs": 20,
    "antisymmetry_pairs": 50,
    "chain_pairs": 20,
    "jacobian_points": 100,
    "sigma_pairs": 20,
    "lock_pairs": 30,
}
KNOWN_FAILURES = {5: "cubic resampling misses 1e-3 at N=128 for pairs crossing the transition shell"}

RESULTS: dict[int, tuple[bool, str]] = {}


def _line(num, rows):
    ok = all(r["passed"] for r in rows)
    worst = ", ".join(
        f"{r['name']}={r['value']:.3e} ({'<=' if r['mode'] == 'max' else '>='} {r['tolerance']:.3g})"
        for r in rows
        if not r["passed"]
    )
    detail = worst or f"{len(rows)} checks"
    return ok, f"{'PASS' if ok else 'FAIL'}  criterion {num:2d} {CRITERIA[num][0]}: {detail}"


@pytest.fixture(scope="module")
def cfg():
    return ScenarioConfig.default(2)


@pytest.fixture(scope="module")
def blocks(cfg):
    return run_classical(cfg), run_quantum(cfg)


def test_tolerances_are_pinned(cfg):
    assert cfg.d == 2 and cfg.grid.N == 128
    for k, v in PINNED.items():
        assert cfg.tol[k] == v, k
    for k, v in PINNED_COUNTS.items():
        assert cfg.suite[k] == v, k


def _marks(num):
    if num in KNOWN_FAILURES:
        return [pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[num])]
    return []


@pytest.mark.parametrize("num", [pytest.param(n, marks=_marks(n), id=f"criterion_{n:02d}") for n in CRITERIA])
def test_criterion(num, cfg, blocks):
    rows = criterion_rows(cfg, num, *blocks)
    assert rows
    ok, line = _line(num, rows)
    RESULTS[num] = (ok, line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    c = ScenarioConfig.default(2)
    b = run_classical(c), run_quantum(c)
    for n in CRITERIA:
        print(_line(n, criterion_rows(c, n, *b))[1], flush=True)
