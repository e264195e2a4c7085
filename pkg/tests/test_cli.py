import math
import re
from pathlib import Path

import pytest

from ecsbell import cli, sweep
from ecsbell.config import SweepConfig

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _data(text):
    lines = [l for l in text.split("\n") if l and not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_bell_grid_point_and_csv_format(tmp_path):
    out = tmp_path / "g.csv"
    assert cli.main(["bell-grid", "--config", str(CONFIGS / "c2_srp_asymmetric.ini"),
                     "--out", str(out), "--jobs", "1"]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    text = raw.decode("utf-8")
    assert text.startswith("# ecsbell: ")
    assert "# config.theta: 0.0" in text
    header, rows = _data(text)
    assert header[-2:] == ["dim1", "dim2"]
    row = dict(zip(header, rows[0]))
    assert float(row["S_RP"]) == pytest.approx(2.812, abs=5e-3)
    # 17 significant digits round-trip exactly
    assert len(re.sub(r"[^0-9]", "", row["S_RP"]).lstrip("0")) == 17


def test_output_is_byte_identical(tmp_path):
    args = ["bell-sweep", "--alpha", "0.2:0.6:0.2", "--restarts", "2", "--jobs", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_worker_pool_keeps_grid_order(tmp_path):
    args = ["bell-sweep", "--alpha", "0.2:0.8:0.2", "--restarts", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--jobs", "1", "--out", str(a)]) == 0
    assert cli.main(args + ["--jobs", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_every_row_carries_dims():
    rec = sweep.run(SweepConfig("correlations", alpha=(0.0, 0.5, 1.0)))
    i1, i2 = rec.columns.index("dim1"), rec.columns.index("dim2")
    assert all(r[i1] >= 20 and r[i2] >= 20 for r in rec.rows)
    assert rec.rows[0][2:6] == pytest.approx((1, 1, 1, 1))
    assert all(s <= 2 + 1e-12 for s in rec.column("S_mixture"))


def test_dim_override_applies():
    rec = sweep.run(SweepConfig("bell-grid", alpha1=(1.0,), alpha2=(1.0,), dim=60))
    assert rec.rows[0][-2:] == (60, 60)


def test_verify_passes_and_low_truncation_exits_3(tmp_path):
    assert cli.main(["verify", "--config", str(CONFIGS / "verify.ini"), "--out", str(tmp_path / "v.csv"),
                     "--jobs", "1"]) == 0
    out = tmp_path / "low.csv"
    assert cli.main(["verify", "--config", str(CONFIGS / "verify_low_truncation.ini"),
                     "--out", str(out), "--jobs", "1"]) == 3
    text = out.read_text()
    assert "configured_points,truncation" in text
    assert "# failing_checks: configured_points" in text


def test_gate_fidelity_rows(tmp_path):
    out = tmp_path / "f.csv"
    assert cli.main(["gate-fidelity", "--config", str(CONFIGS / "c7_fig3_gate.ini"), "--out", str(out),
                     "--jobs", "1"]) == 0
    header, rows = _data(out.read_text())
    assert header == ["t", "fidelity", "dim"] and len(rows) == 2000
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-12)
    assert float(rows[-1][1]) == pytest.approx(0.998, abs=2e-3)


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[state]\nalpha = 0:1:0\n")
    assert cli.main(["correlations", "--config", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["gate-fidelity", "--dim", "10"]) == 3
    assert cli.main(["bell-grid", "--alpha", "0", "--theta", "pi"]) == 1
    assert cli.main(["gate-fidelity", "--phi", "7"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["bell-grid", "--alpha", "0:1"])
    assert info.value.code == 1


def test_failed_numeric_check_exits_2(monkeypatch, tmp_path):
    monkeypatch.setattr(sweep, "DISCREPANCY_TOL", -1.0)
    assert cli.main(["bell-grid", "--alpha", "1.0", "--jobs", "1", "--out", str(tmp_path / "x.csv")]) == 2


def test_stdout_when_no_out(capsys):
    assert cli.main(["bell-grid", "--alpha", "1.1", "--jobs", "1"]) == 0
    assert "alpha1,alpha2,S_RP" in capsys.readouterr().out


def test_plot_written(tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "c.csv"
    assert cli.main(["correlations", "--alpha", "0:1:0.25", "--plot", "--out", str(out), "--jobs", "1"]) == 0
    svg = out.with_suffix(".svg")
    assert svg.exists() and svg.read_text().lstrip().startswith("<?xml")


def test_thresholds_detected_by_interpolation():
    xs = [0.0, 0.1, 0.2, 0.3, 0.4]
    s_rp = [2.0, 1.9, 1.8, 2.1, 2.3]
    s_bw = [1.9, 2.0, 2.0, 2.05, 2.2]
    th = sweep.detect_thresholds(xs, s_rp, s_bw)
    assert th["s_rp_min_alpha"] == 0.2 and th["s_rp_decreasing_to_min"]
    assert th["s_rp_crosses_2_at"] == pytest.approx(0.2 + 0.1 * 2 / 3)
    assert th["s_rp_exceeds_s_bw_from"] == pytest.approx(0.2 + 0.1 * 0.2 / 0.25)
    assert math.isnan(sweep.crossing(xs, s_rp, 5.0))
