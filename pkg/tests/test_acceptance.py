"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line, which is printed in the terminal
summary. Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from pathlib import Path

import pytest

from ecsbell import ecs, sweep, verify
from ecsbell.config import load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SQRT8 = 2 * math.sqrt(2)


@pytest.fixture
def report(record_property):
    def emit(criterion, ok, text):
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {text}"
        print(line)
        record_property("acceptance", line)
        return ok
    return emit


def _run(name, mode=None):
    cfg = load_config(CONFIGS / name, mode=mode)
    t0 = time.perf_counter()
    rec = sweep.run(cfg)
    return rec, time.perf_counter() - t0


def test_criterion_1_srp_alpha_1p1(report):
    rec, dt = _run("c1_srp_alpha1p1.ini")
    s = rec.column("S_RP")[0]
    ok = abs(s - 2.799) <= 0.005 and dt < 1.0
    assert report("1 S_RP(1.1)", ok, f"{s:.5f} (target 2.799 +/- 0.005), {dt:.3f} s (< 1 s)")


def test_criterion_2_srp_asymmetric(report):
    rec, dt = _run("c2_srp_asymmetric.ini")
    s = rec.column("S_RP")[0]
    ok = abs(s - 2.812) <= 0.005 and dt < 1.0
    assert report("2 S_RP(1.1, 1.3)", ok, f"{s:.5f} (target 2.812 +/- 0.005), {dt:.3f} s (< 1 s)")


@pytest.fixture(scope="module")
def bw_run():
    return _run("c3_bw_optimize.ini")


def _bw_value(rec, alpha):
    for row in rec.rows:
        if row[0] == alpha:
            return row[rec.columns.index("S_BW")], row[rec.columns.index("dim1")]
    raise KeyError(alpha)


def test_criterion_3_bw_alpha_3(report, bw_run):
    rec, dt = bw_run
    s, dim = _bw_value(rec, 3.0)
    ok = abs(s - 2.77) <= 0.02 and dt < 120
    assert report("3a S_BW(3.0)", ok, f"{s:.5f} (target 2.77 +/- 0.02), both points in {dt:.1f} s (< 120 s), "
                                      f"operator check dim {dim}")


def test_criterion_3_bw_alpha_1p1(report, bw_run):
    rec, dt = bw_run
    s, _ = _bw_value(rec, 1.1)
    ok = abs(s - 2.589) <= 0.02 and dt < 120
    assert report("3b S_BW(1.1)", ok, f"{s:.5f} (target 2.589 +/- 0.02), {dt:.1f} s (< 120 s)")


def test_criterion_4_concurrence(report):
    rec, _ = _run("c4_concurrence.ini")
    c = rec.column("concurrence")[0]
    assert report("4 concurrence(1.1)", abs(c - 0.984) <= 0.001, f"{c:.5f} (target 0.984 +/- 0.001)")


@pytest.fixture(scope="module")
def fig2a():
    return _run("c5_fig2a_sweep.ini")


@pytest.mark.slow
def test_criterion_5_srp_minimum(report, fig2a):
    rec, _ = fig2a
    a_min = rec.footer["s_rp_min_alpha"]
    dec = rec.footer["s_rp_decreasing_to_min"]
    ok = dec and abs(a_min - 0.32) <= 0.02
    assert report("5a S_RP decreasing to its minimum", ok,
                  f"minimum at alpha={a_min:.2f}, strictly decreasing before it: {dec} (target 0.32 +/- 0.02)")


@pytest.mark.slow
def test_criterion_5_srp_crosses_2(report, fig2a):
    rec, _ = fig2a
    x = rec.footer["s_rp_crosses_2_at"]
    assert report("5b S_RP = 2 crossing", abs(x - 0.47) <= 0.01, f"alpha={x:.4f} (target 0.47 +/- 0.01)")


@pytest.mark.slow
def test_criterion_5_rp_overtakes_bw(report, fig2a):
    rec, _ = fig2a
    x = rec.footer["s_rp_exceeds_s_bw_from"]
    ok = abs(x - 0.55) <= 0.02
    assert report("5c S_RP > S_BW beyond", ok, f"alpha={x:.4f} (target 0.55 +/- 0.02)")


@pytest.mark.slow
def test_criterion_5_runtime(report, fig2a):
    rec, dt = fig2a
    ok = dt < 1800 and len(rec.rows) == 301
    assert report("5d full sweep runtime", ok, f"{len(rec.rows)} points with optimization in {dt:.0f} s (< 1800 s)")


def test_criterion_6_rotation_overlap(report):
    v = verify.rotation_overlap(math.sqrt(2), math.pi / 4)
    assert report("6 rotation overlap at sqrt(2)", v > 0.999, f"{v:.6f} (> 0.999)")


def test_criterion_7_gate(report):
    rec, dt = _run("c7_fig3_gate.ini")
    f = rec.footer["final_fidelity"]
    err = rec.footer["period_relative_error"]
    ok = abs(f - 0.998) <= 0.002 and err <= 0.1 and dt < 60
    assert report("7 gate fidelity and period", ok,
                  f"F(tau)={f:.5f} (target 0.998 +/- 0.002), period {rec.footer['oscillation_period']:.4f} "
                  f"(2 pi within {err:.1e} <= 0.1), {dt:.1f} s (< 60 s)")


def test_criterion_8_property_suite(report):
    rec, dt = _run("verify.ini")
    summary = ", ".join(f"{c.name}={c.measured:.1e}" for c in rec.checks)
    failing = [c.name for c in rec.failures]
    ok = not failing
    assert report("8 property suite", ok, f"{len(rec.checks) - len(failing)}/{len(rec.checks)} checks pass "
                                          f"in {dt:.1f} s; {summary}")


def test_criterion_9_asymptote(report):
    rec, _ = _run("c9_srp_alpha2p5.ini")
    s = rec.column("S_RP")[0]
    d = abs(s - SQRT8)
    assert report("9 S_RP(2.5) near 2 sqrt 2", d <= 1e-3, f"|S_RP - 2 sqrt 2| = {d:.2e} (<= 1e-3)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
