"""Single-pulse dispersive phase gate.

A qubit dispersively coupled to the oscillator is driven by one square pulse,

    H = chi n |e><e| + Omega (e^{i delta t} |e><g| + h.c.),

with ``chi`` setting the time unit. For the oscillator vacuum the qubit makes
a full detuned Rabi cycle (``eps tau = pi``, ``eps = sqrt(Omega^2 + delta^2/4)``)
and returns to ``|g>`` with phase ``phi``; for ``n >= 1`` the drive is far off
resonance and the qubit stays put.

Two propagators are provided and must agree: direct RK4 stepping of the
time-dependent Hamiltonian (compiled kernel, Richardson-checked) and exact
2x2 block exponentials in the frame where the drive is static.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks, hilbert

from ecsbell import fock, kernels
from ecsbell.errors import DomainError, StepSizeFailure, TruncationError

REGIME_WARN_RATIO = 0.3
NORM_TOL = 1e-9
DEFAULT_RK4_TOL = 1e-10
MAX_HALVINGS = 10
DEFAULT_POINTS = 2000


@dataclass(frozen=True)
class PulseParams:
    chi: float
    omega: float
    delta: float
    tau: float
    phi: float

    @property
    def epsilon(self) -> float:
        return math.sqrt(self.omega ** 2 + self.delta ** 2 / 4.0)

    @property
    def regime_ratio(self) -> float:
        """``max(|delta|, Omega) / |chi|``; the gate needs this well below 1."""
        return max(abs(self.delta), abs(self.omega)) / abs(self.chi)

    @property
    def in_regime(self) -> bool:
        return self.regime_ratio <= REGIME_WARN_RATIO


def detuning_for_phase(phi: float, omega: float) -> float:
    """Drive detuning that returns ``|g,0>`` with phase ``phi`` after one cycle."""
    if 0 < phi < 2 * math.pi:
        return 2 * omega * (math.pi - phi) / math.sqrt(phi * (2 * math.pi - phi))
    if -2 * math.pi < phi < 0:
        return -2 * omega * (math.pi + phi) / math.sqrt(-phi * (2 * math.pi + phi))
    raise DomainError(f"phase {phi} outside (-2pi, 0) U (0, 2pi)")


def pulse_for_phase(phi: float, omega: float, chi: float = 1.0) -> PulseParams:
    """Square pulse realizing phase ``phi`` on the vacuum; ``phi = 0`` gives ``tau = 0``.

    Check ``in_regime`` on the result: the detuning grows with Omega, so the
    dispersive approximation weakens before Omega itself approaches chi.
    """
    if chi == 0:
        raise DomainError("chi must be nonzero")
    if phi == 0:
        return PulseParams(chi, omega, 0.0, 0.0, 0.0)
    if omega <= 0:
        raise DomainError("omega must be positive")
    delta = detuning_for_phase(phi, omega)
    eps = math.sqrt(omega ** 2 + delta ** 2 / 4.0)
    return PulseParams(chi, omega, delta, math.pi / eps, phi)


@dataclass(frozen=True, eq=False)
class QubitOscState:
    """Amplitudes over {|g>, |e>} x Fock(dim), qubit as the slow index."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if a.size % 2:
            raise ValueError("qubit-oscillator amplitudes must have even length")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_parts(cls, g, e=None) -> "QubitOscState":
        g = np.asarray(g, dtype=np.complex128)
        e = np.zeros_like(g) if e is None else np.asarray(e, dtype=np.complex128)
        return cls(np.concatenate([g, e]))

    @classmethod
    def ground_with(cls, oscillator) -> "QubitOscState":
        """``|g> x |osc>`` from a :class:`~ecsbell.fock.StateVector` or amplitude array."""
        amps = oscillator.amps if isinstance(oscillator, fock.StateVector) else oscillator
        return cls.from_parts(amps)

    @property
    def dim(self) -> int:
        return self.amps.size // 2

    @property
    def g(self) -> np.ndarray:
        return self.amps[: self.dim]

    @property
    def e(self) -> np.ndarray:
        return self.amps[self.dim:]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def inner(self, other: "QubitOscState") -> complex:
        return complex(np.vdot(self.amps, other.amps))


def vacuum_evolution_closed_form(params: PulseParams, t: float) -> QubitOscState:
    """Exact ``|g,0>`` evolution: amplitudes on ``|g,0>`` and ``|e,0>`` (dim = 1)."""
    eps = params.epsilon
    d = params.delta
    if eps == 0:
        return QubitOscState.from_parts([1.0], [0.0])
    cg = np.exp(-0.5j * d * t) * (math.cos(eps * t) + 1j * d / (2 * eps) * math.sin(eps * t))
    ce = -1j * params.omega / eps * math.sin(eps * t) * np.exp(0.5j * d * t)
    return QubitOscState.from_parts([cg], [ce])


def _check_truncation(initial: QubitOscState):
    # H conserves n, so truncation only matters if the initial state was cut off;
    # tiny spaces are explicit Fock sectors and are exact.
    dim = initial.dim
    if dim <= 2 * fock.EDGE_BUFFER:
        return
    edge = max(0, dim - fock.EDGE_BUFFER)
    mass = float((np.abs(initial.g[edge:]) ** 2 + np.abs(initial.e[edge:]) ** 2).sum())
    if mass > fock.TAIL_TOL:
        pop = np.abs(initial.g) ** 2 + np.abs(initial.e) ** 2
        amp = math.sqrt(float(np.dot(np.arange(dim), pop)) / float(pop.sum()))
        raise TruncationError(amp, dim, fock.required_dim(amp) + fock.EDGE_BUFFER, mass)


def _static_frame(params: PulseParams, initial: QubitOscState, t_grid, drive_phase=0.0):
    # With c_e = e^{i delta t} d_e the block for level n is [[0, W*], [W, chi n + delta]].
    n = np.arange(initial.dim)
    om = params.omega * np.exp(1j * drive_phase)
    lam = params.chi * n + params.delta
    eps = np.sqrt(abs(om) ** 2 + lam ** 2 / 4.0)
    g0, e0 = initial.g, initial.e
    out = []
    for t in np.asarray(t_grid, dtype=float):
        ph = np.exp(-0.5j * lam * t)
        c = np.cos(eps * t)
        s = np.divide(np.sin(eps * t), eps, out=np.full_like(eps, t), where=eps > 0)
        # exp(-i t H) = e^{-i lam t/2} [cos(eps t) - i sin(eps t)/eps (H - lam/2)]
        u_gg = ph * (c + 0.5j * lam * s)
        u_ee = ph * (c - 0.5j * lam * s)
        u_ge = ph * (-1j * np.conj(om) * s)
        u_eg = ph * (-1j * om * s)
        g = u_gg * g0 + u_ge * e0
        d_e = u_eg * g0 + u_ee * e0
        out.append(QubitOscState.from_parts(g, np.exp(1j * params.delta * t) * d_e))
    return out


def _rk4(params: PulseParams, initial: QubitOscState, t_grid, tol: float, drive_phase=0.0):
    ts = np.asarray(t_grid, dtype=float)
    span = float(ts[-1] - ts[0]) if ts.size > 1 else 0.0
    if span == 0.0:
        return [initial for _ in ts]
    h = min(2 * math.pi / (200 * abs(params.chi)), span / 2000)
    # a drive phase is absorbed into |e> (c_e -> e^{i phase} c_e)
    gauge = complex(np.exp(1j * drive_phase))
    g0, e0 = initial.g, initial.e / gauge

    def run(step):
        return kernels.rk4_dispersive(g0, e0, params.chi, params.omega, params.delta, ts, step)

    coarse = run(h)
    err = math.inf
    for _ in range(MAX_HALVINGS):
        fine = run(h / 2)
        diff = np.abs(coarse[0] - fine[0]) ** 2 + np.abs(coarse[1] - fine[1]) ** 2
        err = float(np.sqrt(diff.sum(axis=1)).max()) / 15.0
        if err <= tol:
            G, E = fine
            return [QubitOscState.from_parts(G[k], E[k] * gauge) for k in range(ts.size)]
        h /= 2
        coarse = fine
    raise StepSizeFailure(f"RK4 Richardson error {err:.3e} above {tol:.1e} after {MAX_HALVINGS} halvings")


def propagate(params: PulseParams, initial: QubitOscState, t_grid, method: str = "rk4",
              tol: float = DEFAULT_RK4_TOL, drive_phase: float = 0.0) -> list[QubitOscState]:
    """States at each time of ``t_grid`` (starting from ``initial`` at ``t_grid[0]``).

    ``method='rk4'`` steps the time-dependent Hamiltonian directly, halving the
    step until the Richardson estimate is below ``tol``; ``method='static'``
    uses exact block exponentials (``t_grid[0]`` must be 0). ``drive_phase``
    multiplies Omega by ``e^{i drive_phase}``.
    """
    _check_truncation(initial)
    if method == "rk4":
        states = _rk4(params, initial, t_grid, tol, drive_phase)
    elif method == "static":
        if len(t_grid) and float(t_grid[0]) != 0.0:
            raise ValueError("static-frame propagation starts at t = 0")
        states = _static_frame(params, initial, t_grid, drive_phase)
    else:
        raise ValueError(f"unknown method {method!r}")
    for st in states:
        if abs(st.norm() - initial.norm()) > NORM_TOL:
            raise StepSizeFailure(f"norm drift {abs(st.norm() - initial.norm()):.3e}")
    return states


def time_grid(params: PulseParams, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(0.0, params.tau, n_points)


def initial_state(alpha: complex, dim: int | None = None) -> QubitOscState:
    """``|g> x |2 alpha>``, the oscillator state the gate sees inside ``R_z``."""
    space = fock.FockSpace(dim or fock.required_dim(2 * alpha))
    return QubitOscState.ground_with(fock.coherent_state(space, 2 * alpha))


def fidelity_curve(params: PulseParams, alpha: complex, n_points: int = DEFAULT_POINTS,
                   method: str = "rk4", dim: int | None = None):
    """``[(t, |<psi(0)|psi(t)>|^2)]`` on ``n_points`` uniform times in ``[0, tau]``."""
    psi0 = initial_state(alpha, dim)
    ts = time_grid(params, n_points)
    states = propagate(params, psi0, ts, method=method)
    return [(float(t), abs(psi0.inner(s)) ** 2) for t, s in zip(ts, states)]


def phase_gate_error(params: PulseParams, alpha: complex, method: str = "rk4",
                     dim: int | None = None) -> float:
    """``1 - |<target|psi(tau)>|^2`` with target the ideal vacuum-phase gate on ``|g,2 alpha>``."""
    psi0 = initial_state(alpha, dim)
    final = propagate(params, psi0, [0.0, params.tau], method=method)[-1]
    target_g = psi0.g.copy()
    target_g[0] *= np.exp(1j * params.phi)
    target = QubitOscState.from_parts(target_g)
    return float(min(1.0, max(0.0, 1.0 - abs(target.inner(final)) ** 2)))


def oscillation_period(times, values, chi: float = 1.0) -> float:
    """Collapse-revival period of a fidelity trace, from envelope peak spacing.

    The fast ripple (frequency ~ chi * <n>) is demodulated with a Hilbert
    transform after removing a moving-average trend over ``pi / (3|chi|)``;
    the smoothed envelope's dominant maxima (at least half the largest) give
    the revival times. Returns ``nan`` when fewer than two revivals are seen.
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(values, dtype=float)
    dt = t[1] - t[0]
    w = max(3, int(round(math.pi / (3 * abs(chi)) / dt)))
    trend = uniform_filter1d(f, w, mode="nearest")
    env = uniform_filter1d(np.abs(hilbert(f - trend)), w, mode="nearest")
    padded = np.concatenate([[0.0], env, [0.0]])
    peaks, _ = find_peaks(padded, height=0.5 * env.max(), distance=max(1, int(round(math.pi / (abs(chi) * dt)))))
    peaks = peaks - 1
    if peaks.size < 2:
        return float("nan")
    return float(np.mean(np.diff(t[peaks])))
