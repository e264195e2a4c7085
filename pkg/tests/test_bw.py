import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecsbell import bw, ecs
from ecsbell.bw import DisplacementSettings
from ecsbell.ecs import EcsSpec

betas = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1.8), st.floats(0, 1.8), st.floats(0, 2 * math.pi), betas, betas)
def test_closed_form_matches_operator_path(a1, a2, theta, b1, b2):
    if 2 + 2 * math.cos(theta) * math.exp(-2 * (a1 * a1 + a2 * a2)) < 1e-3:
        return
    spec = EcsSpec(a1, a2, theta)
    assert bw.bw_correlation(spec, b1, b2) == pytest.approx(
        bw.bw_correlation_closed_form(spec, b1, b2), abs=1e-8)


def test_zero_displacement_is_parity_correlation():
    # D(0) P D(0)^dag = P and P x P is +1 on the even ECS
    spec = EcsSpec(1.0, 0.7, 0.0)
    assert bw.bw_correlation_closed_form(spec, 0, 0) == pytest.approx(1.0, abs=1e-14)


def test_settings_roundtrip():
    st_ = DisplacementSettings(0.1 + 0.2j, -0.3j, 0.5, -0.7 + 0.1j)
    assert DisplacementSettings.from_params(st_.to_params()) == st_


def test_signal_paths_agree():
    spec = EcsSpec(1.1, 1.1)
    s = DisplacementSettings(0.1j, -0.2j, 0.3 + 0.1j, 0.05)
    assert bw.bell_signal_bw(spec, s, method="operator") == pytest.approx(bw.bell_signal_bw(spec, s), abs=1e-8)
    with pytest.raises(ValueError):
        bw.bell_signal_bw(spec, s, method="nope")


def test_initial_simplex_reproducible_and_in_box():
    spec = EcsSpec(1.0, 1.0)
    a = bw.initial_simplex(spec, 3, seed=7)
    b = bw.initial_simplex(spec, 3, seed=7)
    assert np.array_equal(a, b)
    assert a.shape == (9, 8)
    assert np.abs(a).max() <= bw.search_box(spec)
    assert not np.array_equal(a, bw.initial_simplex(spec, 4, seed=7))
    assert bw.initial_simplex(spec, 0, real_only=True).shape == (5, 4)


def test_optimizer_deterministic_and_schedule_independent():
    spec = EcsSpec(0.8, 0.8)
    serial = bw.optimize_bw(spec, restarts=4, seed=11)
    again = bw.optimize_bw(spec, restarts=4, seed=11)
    with ThreadPoolExecutor(2) as pool:
        pooled = bw.optimize_bw(spec, restarts=4, seed=11, executor=pool)
    assert serial == again == pooled
    assert serial.best_signal == max(serial.restart_signals)
    assert serial.restarts_used == 4


def test_optimizer_respects_bounds():
    for a in (0.0, 0.5, 2.0):
        res = bw.optimize_bw(EcsSpec(a, a), restarts=4)
        assert res.best_signal <= ecs.TSIRELSON + 1e-12
    # the vacuum is a product state
    assert bw.optimize_bw(EcsSpec(0.0, 0.0), restarts=4).best_signal <= 2.0 + 1e-9


def test_real_only_never_beats_complex():
    spec = EcsSpec(1.1, 1.1)
    real = bw.optimize_bw(spec, restarts=8, real_only=True)
    full = bw.optimize_bw(spec, restarts=8)
    assert all(abs(b.imag) == 0 for b in (real.best_settings.beta1, real.best_settings.beta2p))
    assert real.best_signal <= full.best_signal + 1e-9


def test_iteration_cap_reports_nonconvergence():
    res = bw.optimize_bw(EcsSpec(1.0, 1.0), restarts=2, max_iter=5)
    assert not res.converged
    assert res.best_signal > 0


def test_margin():
    res = bw.optimize_bw(EcsSpec(3.0, 3.0), restarts=8)
    assert bw.tsirelson_margin(res) == pytest.approx(2 * math.sqrt(2) - res.best_signal)
    # optimum is stable when the budget grows
    assert res.best_signal == pytest.approx(2.7713, abs=2e-3)
