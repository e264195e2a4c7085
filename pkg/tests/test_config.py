import math

import pytest

from ecsbell.config import SweepConfig, load_config, parse_config_text, parse_number, parse_range
from ecsbell.errors import ConfigError


def test_parse_range_inclusive_and_clean():
    r = parse_range("0:3:0.01")
    assert len(r) == 301 and r[0] == 0.0 and r[-1] == 3.0
    assert r[7] == 0.07
    assert parse_range("1.1, 3.0") == (1.1, 3.0)
    assert parse_range("2") == (2.0,)


@pytest.mark.parametrize("bad", ["", "0:1", "0:1:0", "1:0:0.1", "0:1:-1", "a:b:c"])
def test_parse_range_rejects(bad):
    with pytest.raises(ValueError):
        parse_range(bad)


def test_parse_number_pi_forms():
    assert parse_number("pi/4") == pytest.approx(math.pi / 4)
    assert parse_number("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_number("0.5*pi") == pytest.approx(math.pi / 2)
    assert parse_number("1e-3") == 1e-3
    with pytest.raises(ValueError):
        parse_number("nan")


def test_sections_and_keys():
    vals = parse_config_text("[run]\nmode = bell-sweep\n[state]\nalpha = 0:1:0.5\ntheta = pi\n"
                             "[optimizer]\nrestarts = 4\nenabled = no\n")
    assert vals == {"mode": "bell-sweep", "alpha": (0.0, 0.5, 1.0), "theta": math.pi,
                    "restarts": 4, "optimize": False}


def test_error_carries_line_and_field():
    with pytest.raises(ConfigError) as info:
        parse_config_text("[run]\nmode = verify\n\n[state]\nalpha = 0:1:0\n", path="x.ini")
    assert info.value.line == 5 and info.value.field == "state.alpha" and info.value.path == "x.ini"
    with pytest.raises(ConfigError) as info:
        parse_config_text("[state]\nalhpa = 1\n")
    assert info.value.field == "state.alhpa" and info.value.line == 2
    with pytest.raises(ConfigError):
        parse_config_text("[nowhere]\nx = 1\n")
    with pytest.raises(ConfigError) as info:
        parse_config_text("alpha = 1\n")
    assert info.value.line == 1


def test_flags_override_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[run]\nmode = bell-grid\n[state]\nalpha1 = 1.1\nalpha2 = 1.3\ntheta = 0.5\n")
    cfg = load_config(p, mode="bell-grid", overrides={"theta": 0.0, "alpha2": (1.1,), "seed": None})
    assert cfg.theta == 0.0 and cfg.alpha2 == (1.1,) and cfg.alpha1 == (1.1,)
    with pytest.raises(ConfigError):
        load_config(p, mode="verify")


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/x.ini", mode="verify")


def test_pairs():
    assert SweepConfig("bell-grid", alpha1=(1.0, 2.0), alpha2=(3.0,)).pairs() == [(1.0, 3.0), (2.0, 3.0)]
    assert SweepConfig("bell-sweep", alpha=(0.5,)).pairs() == [(0.5, 0.5)]
    assert SweepConfig("bw-optimize", alpha1=(1.0, 2.0), alpha2=(3.0,)).pairs() == [(1.0, 3.0), (2.0, 3.0)]
    with pytest.raises(ConfigError):
        SweepConfig("bell-sweep", alpha1=(1.0, 2.0), alpha2=(1.0, 2.0, 3.0)).pairs()
    with pytest.raises(ConfigError):
        SweepConfig("bell-sweep").pairs()


def test_invariants():
    with pytest.raises(ConfigError):
        SweepConfig("plot-everything")
    with pytest.raises(ConfigError):
        SweepConfig("verify", dim=0)
    with pytest.raises(ConfigError):
        SweepConfig("verify", alpha=())
    assert SweepConfig("verify").seed == 20190412


def test_echo_is_stable():
    a = SweepConfig("bell-sweep", alpha=(0.1, 0.2)).echo()
    assert a["alpha"] == "0.1,0.2" and a["dim"] == "none" and "jobs" not in a
