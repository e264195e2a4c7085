import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecsbell import gate
from ecsbell.errors import DomainError, StepSizeFailure, TruncationError
from ecsbell.gate import QubitOscState

VACUUM = QubitOscState.from_parts([1.0])


def test_detuning_for_quarter_phase():
    assert gate.detuning_for_phase(math.pi / 4, 0.2) == pytest.approx(6 / math.sqrt(7) * 0.2)


def test_detuning_branches_are_mirror_images():
    for phi in (0.3, 1.0, 2.5, 5.0):
        assert gate.detuning_for_phase(-phi, 0.1) == pytest.approx(-gate.detuning_for_phase(phi, 0.1))


@pytest.mark.parametrize("phi", [2 * math.pi, -2 * math.pi, 7.0])
def test_detuning_domain(phi):
    with pytest.raises(DomainError):
        gate.detuning_for_phase(phi, 0.1)


def test_zero_phase_is_empty_pulse():
    p = gate.pulse_for_phase(0.0, 0.2)
    assert p.tau == 0.0 and p.delta == 0.0


def test_regime_flag():
    assert not gate.pulse_for_phase(math.pi / 4, 0.2).in_regime
    p = gate.pulse_for_phase(math.pi / 4, 0.05)
    assert p.in_regime and p.regime_ratio == pytest.approx(6 / math.sqrt(7) * 0.05)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.02, 0.3), st.floats(0.1, 2 * math.pi - 0.1), st.sampled_from([-1, 1]))
def test_vacuum_phase_after_pulse(omega, phi, sign):
    p = gate.pulse_for_phase(sign * phi, omega)
    final = gate.vacuum_evolution_closed_form(p, p.tau)
    assert abs(final.e[0]) < 1e-12
    assert np.angle(final.g[0]) == pytest.approx(np.angle(np.exp(1j * sign * phi)), abs=1e-12)


@settings(max_examples=5, deadline=None)
@given(st.floats(0.02, 0.3), st.floats(0.1, 2 * math.pi - 0.1))
def test_integrator_matches_closed_form(omega, phi):
    p = gate.pulse_for_phase(phi, omega)
    ts = gate.time_grid(p, 40)
    states = gate.propagate(p, VACUUM, ts)
    err = max(np.abs(s.amps - gate.vacuum_evolution_closed_form(p, t).amps).max() for s, t in zip(states, ts))
    assert err <= 1e-6


def test_rk4_matches_static_frame():
    p = gate.pulse_for_phase(math.pi / 4, 0.2)
    psi0 = gate.initial_state(1.0)
    ts = gate.time_grid(p, 50)
    a = gate.propagate(p, psi0, ts, method="rk4")
    b = gate.propagate(p, psi0, ts, method="static")
    assert max(np.abs(x.amps - y.amps).max() for x, y in zip(a, b)) < 1e-8
    assert all(abs(s.norm() - 1) < 1e-9 for s in a)


def test_drive_phase_is_a_gauge_on_excited_state():
    p = gate.pulse_for_phase(math.pi / 3, 0.1)
    ts = gate.time_grid(p, 10)
    a = gate.propagate(p, VACUUM, ts, method="rk4", drive_phase=0.7)
    b = gate.propagate(p, VACUUM, ts, method="static", drive_phase=0.7)
    assert max(np.abs(x.amps - y.amps).max() for x, y in zip(a, b)) < 1e-8
    plain = gate.propagate(p, VACUUM, ts, method="static")
    assert np.allclose(np.abs(a[-1].amps), np.abs(plain[-1].amps))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_photon_levels_pick_up_small_dispersive_phase(n):
    # off-resonant levels acquire roughly Omega^2 t / (n chi + delta)
    omega = 0.05
    p = gate.pulse_for_phase(math.pi / 4, omega)
    g = np.zeros(12)
    g[n] = 1.0
    final = gate.propagate(p, QubitOscState.from_parts(g), [0.0, p.tau])[-1]
    predicted = omega ** 2 * p.tau / (n * p.chi + p.delta)
    assert np.angle(final.g[n]) == pytest.approx(predicted, rel=0.2)
    assert abs(final.g[n]) > 0.99


def test_fidelity_curve_shape_and_start():
    p = gate.pulse_for_phase(math.pi / 4, 0.2)
    curve = gate.fidelity_curve(p, 2.0, method="static")
    assert len(curve) == gate.DEFAULT_POINTS
    assert curve[0] == (0.0, pytest.approx(1.0, abs=1e-12))
    assert all(0.0 <= f <= 1.0 + 1e-9 for _, f in curve)


def test_collapse_revival_period():
    p = gate.pulse_for_phase(math.pi / 4, 0.2)
    t, f = zip(*gate.fidelity_curve(p, 2.0, method="static"))
    assert gate.oscillation_period(np.array(t), np.array(f), p.chi) == pytest.approx(2 * math.pi, rel=0.1)


def test_phase_gate_error_small_and_vanishing_on_vacuum():
    p = gate.pulse_for_phase(math.pi / 4, 0.05)
    assert gate.phase_gate_error(p, 0.0, method="static") < 1e-12
    assert gate.phase_gate_error(p, 2.0, method="static") < 1e-3


def test_truncation_of_initial_state():
    with pytest.raises(TruncationError):
        gate.initial_state(2.0, dim=20)


def test_truncated_input_rejected_by_propagate():
    g = np.zeros(30)
    g[-1] = 1.0
    with pytest.raises(TruncationError):
        gate.propagate(gate.pulse_for_phase(1.0, 0.1), QubitOscState.from_parts(g), [0.0, 1.0])


def test_step_size_failure():
    p = gate.pulse_for_phase(math.pi / 4, 0.2)
    with pytest.raises(StepSizeFailure):
        gate.propagate(p, VACUUM, [0.0, p.tau], tol=1e-30)


def test_unknown_method():
    with pytest.raises(ValueError):
        gate.propagate(gate.pulse_for_phase(1.0, 0.1), VACUUM, [0.0, 1.0], method="euler")
