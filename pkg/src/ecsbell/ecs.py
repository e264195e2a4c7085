"""Entangled coherent states and rotated-parity Bell correlations.

The state is ``N (|a1>|a2> + e^{i theta} |-a1>|-a2>)``. Each analyzer is the
rotated parity ``R_z(phi) P R_z(phi)^dag`` with ``R_z = D^dag(a) G(phi) D(a)``.
Correlations are available from a closed form in coherent-state overlaps and
from the truncated-operator path; the two are kept independent so each can
check the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ecsbell import fock
from ecsbell.errors import DegenerateStateError
from ecsbell.fock import FockSpace, StateVector

TSIRELSON = 2.0 * math.sqrt(2.0)
# Above this per-mode dimension the rotated parity is applied factor by factor.
MATRIX_FORM_MAX_DIM = 48


@dataclass(frozen=True)
class EcsSpec:
    """Parameters ``(alpha1, alpha2, theta)`` of the entangled coherent state."""

    alpha1: complex
    alpha2: complex
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))
        object.__setattr__(self, "theta", float(self.theta))
        denom = 2.0 + 2.0 * math.cos(self.theta) * self.overlap
        if not denom > 1e-14:
            raise DegenerateStateError(
                f"state vanishes for alpha1={self.alpha1}, alpha2={self.alpha2}, theta={self.theta}")

    @property
    def overlap(self) -> float:
        """``<a1,a2|-a1,-a2> = exp(-2(|a1|^2 + |a2|^2))``."""
        return math.exp(-2.0 * (abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2))

    @property
    def norm_sq(self) -> float:
        return 1.0 / (2.0 + 2.0 * math.cos(self.theta) * self.overlap)

    @property
    def normalization(self) -> float:
        return math.sqrt(self.norm_sq)

    def default_dims(self) -> tuple[int, int]:
        """Per-mode truncation covering ``2|a_j|``, the largest amplitude inside ``R_z``."""
        return fock.required_dim(2 * self.alpha1), fock.required_dim(2 * self.alpha2)


@dataclass(frozen=True)
class AngleSettings:
    phi1: float
    phi2: float
    phi1p: float
    phi2p: float

    def terms(self):
        """``(phi_a, phi_b, sign)`` for the four CHSH terms."""
        return ((self.phi1, self.phi2, 1.0), (self.phi1, self.phi2p, 1.0),
                (self.phi1p, self.phi2, 1.0), (self.phi1p, self.phi2p, -1.0))


@dataclass(frozen=True)
class CorrelationReport:
    value_numeric: float
    value_analytic: float
    discrepancy: float
    truncation_dim: tuple[int, int]


def _spaces(spec: EcsSpec, dims):
    d1, d2 = spec.default_dims() if dims is None else (dims if not isinstance(dims, int) else (dims, dims))
    return FockSpace(d1), FockSpace(d2)


def build_ecs(spec: EcsSpec, space1: FockSpace | None = None, space2: FockSpace | None = None) -> StateVector:
    """Normalized two-mode ECS on ``space1 x space2`` (defaults cover ``2|a_j|``)."""
    d1, d2 = spec.default_dims()
    space1 = space1 or FockSpace(d1)
    space2 = space2 or FockSpace(d2)
    for space, a in ((space1, spec.alpha1), (space2, spec.alpha2)):
        space.check(a)
    plus = np.kron(fock.coherent_amplitudes(space1.dim, spec.alpha1),
                   fock.coherent_amplitudes(space2.dim, spec.alpha2))
    minus = np.kron(fock.coherent_amplitudes(space1.dim, -spec.alpha1),
                    fock.coherent_amplitudes(space2.dim, -spec.alpha2))
    amps = plus + np.exp(1j * spec.theta) * minus
    norm = np.linalg.norm(amps)
    if norm < 1e-12:
        raise DegenerateStateError("superposition has vanishing norm")
    return StateVector(amps / norm, (space1.dim, space2.dim))


def rotated_parity(space: FockSpace, alpha: complex, phi: float) -> fock.DenseOperator:
    """``P_z(phi) = R_z(phi) P R_z(phi)^dag``; Hermitian with spectrum {-1, +1}."""
    r = fock.rotation_z(space, alpha, phi)
    p = fock.parity_operator(space).matrix
    m = r.matrix @ p @ r.matrix.conj().T
    m = 0.5 * (m + m.conj().T)
    return fock.DenseOperator(m, space.dim, hermitian=True, unitary=True, buffer=r.buffer)


class _RotatedParityFactor:
    """Applies ``R P R^dag`` to a ket without forming the product matrix."""

    def __init__(self, space, alpha, phi):
        self.d = fock.displacement_operator(space, alpha).matrix
        self.g = np.ones(space.dim, dtype=np.complex128)
        self.g[0] = np.exp(1j * phi)
        self.p = np.where(np.arange(space.dim) % 2 == 0, 1.0, -1.0)

    def apply(self, vecs):
        # columns of vecs are kets; R^dag = D^dag G^dag D
        x = self.d @ vecs
        x = self.g.conj()[:, None] * x
        x = self.d.conj().T @ x
        x = self.p[:, None] * x
        x = self.d @ x
        x = self.g[:, None] * x
        return self.d.conj().T @ x


def _local_factor(space, alpha, phi):
    if space.dim <= MATRIX_FORM_MAX_DIM:
        m = rotated_parity(space, alpha, phi).matrix
        return lambda v: m @ v
    return _RotatedParityFactor(space, alpha, phi).apply


def _two_mode_expectation(psi_vec: StateVector, f1, f2) -> float:
    psi = psi_vec.as_tensor()
    x = f1(psi)                  # mode 1 acts on rows
    x = f2(x.T).T                # mode 2 acts on columns
    return complex(np.vdot(psi, x)).real


def correlation_analytic(spec: EcsSpec, phi1: float, phi2: float) -> float:
    """Closed-form rotated-parity correlation ``E(phi1, phi2)``.

    The diagonal factor uses each mode's own angle ``phi_j``.
    """
    x1, x2 = abs(spec.alpha1) ** 2, abs(spec.alpha2) ** 2
    k11 = _k_same(x1, phi1) * _k_same(x2, phi2)
    cross = np.exp(1j * spec.theta) * _k_cross(x1, phi1) * _k_cross(x2, phi2)
    return float(spec.norm_sq * (spec.overlap + k11 + 2.0 * cross.real))


def _k_same(x, phi):
    return math.exp(-2 * x) * (2 * math.cos(phi) - 1) + 2 * math.exp(-6 * x) * (1 - math.cos(phi))


def _k_cross(x, phi):
    e = np.exp(-1j * phi)
    return e + math.exp(-4 * x) * (1 - e)


def correlation_numeric(spec: EcsSpec, phi1: float, phi2: float, dims=None) -> CorrelationReport:
    """``<P_z(phi1) x P_z(phi2)>`` on the truncated ECS, with the analytic value alongside."""
    s1, s2 = _spaces(spec, dims)
    psi = build_ecs(spec, s1, s2)
    value = _two_mode_expectation(psi, _local_factor(s1, spec.alpha1, phi1),
                                  _local_factor(s2, spec.alpha2, phi2))
    analytic = correlation_analytic(spec, phi1, phi2)
    return CorrelationReport(float(value), analytic, abs(value - analytic), (s1.dim, s2.dim))


def canonical_angles(theta: float = 0.0) -> AngleSettings:
    """Analyzer angles with ``cos(theta - phi_a - phi_b) = (r, r, r, -r)``, ``r = sqrt(2)/2``."""
    return AngleSettings(theta, math.pi / 4, theta - math.pi / 2, -math.pi / 4)


def chsh(values) -> float:
    e11, e12, e21, e22 = values
    return abs(e11 + e12 + e21 - e22)


def bell_signal_rp(spec: EcsSpec, angles: AngleSettings | None = None, method: str = "analytic",
                   dims=None) -> float:
    """Rotated-parity CHSH signal ``S_RP``; ``method`` is 'analytic' or 'numeric'."""
    angles = canonical_angles(spec.theta) if angles is None else angles
    if method == "analytic":
        vals = [correlation_analytic(spec, a, b) for a, b, _ in angles.terms()]
    elif method == "numeric":
        s1, s2 = _spaces(spec, dims)
        psi = build_ecs(spec, s1, s2)
        cache1, cache2 = {}, {}

        def f(cache, space, alpha, phi):
            if phi not in cache:
                cache[phi] = _local_factor(space, alpha, phi)
            return cache[phi]

        vals = [_two_mode_expectation(psi, f(cache1, s1, spec.alpha1, a), f(cache2, s2, spec.alpha2, b))
                for a, b, _ in angles.terms()]
    else:
        raise ValueError(f"unknown method {method!r}")
    return chsh(vals)


def concurrence(spec: EcsSpec) -> float:
    """Concurrence of the ECS viewed as a two-qubit state in the even/odd cat basis.

    For general amplitudes this is ``2 N^2 sqrt((1 - p1^2)(1 - p2^2))`` with
    ``p_j = exp(-2|a_j|^2)``; for equal amplitudes and ``theta = 0`` it is
    ``(1 - e^{-4|a|^2}) / (1 + e^{-4|a|^2})``.
    """
    p1 = math.exp(-2 * abs(spec.alpha1) ** 2)
    p2 = math.exp(-2 * abs(spec.alpha2) ** 2)
    c = 2.0 * spec.norm_sq * math.sqrt(max(0.0, (1 - p1 * p1) * (1 - p2 * p2)))
    return min(1.0, max(0.0, c))


def single_mode_parity(spec: EcsSpec, mode: int, dims=None) -> float:
    """``tr(rho_mode P)`` with the other mode traced out."""
    s1, s2 = _spaces(spec, dims)
    psi = build_ecs(spec, s1, s2)
    rho = fock.partial_trace(psi, keep=mode)
    space = s1 if mode == 1 else s2
    return float(np.real(np.trace(rho.matrix @ fock.parity_operator(space).matrix)))


def _single_diag_terms(spec, phi1, phi2):
    # <a|Pz|a> and <-a|Pz|-a> per mode: K_same and exp(-2|a|^2)
    x1, x2 = abs(spec.alpha1) ** 2, abs(spec.alpha2) ** 2
    plus = _k_same(x1, phi1) * _k_same(x2, phi2)
    minus = math.exp(-2 * x1) * math.exp(-2 * x2)
    return plus, minus


def correlation_mixture(spec: EcsSpec, phi1: float, phi2: float, method: str = "analytic",
                        dims=None) -> float:
    """Correlation on the equal mixture of ``|a1,a2>`` and ``|-a1,-a2>`` (theta irrelevant)."""
    if method == "analytic":
        plus, minus = _single_diag_terms(spec, phi1, phi2)
        return 0.5 * (plus + minus)
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    s1, s2 = _spaces(spec, dims)
    f1 = _local_factor(s1, spec.alpha1, phi1)
    f2 = _local_factor(s2, spec.alpha2, phi2)
    total = 0.0
    for sgn in (1, -1):
        k1 = fock.coherent_state(s1, sgn * spec.alpha1).amps
        k2 = fock.coherent_state(s2, sgn * spec.alpha2).amps
        e1 = np.vdot(k1, f1(k1[:, None])[:, 0]).real
        e2 = np.vdot(k2, f2(k2[:, None])[:, 0]).real
        total += 0.5 * e1 * e2
    return float(total)


def bell_signal_mixture(spec: EcsSpec, angles: AngleSettings | None = None) -> float:
    angles = canonical_angles(spec.theta) if angles is None else angles
    return chsh([correlation_mixture(spec, a, b) for a, b, _ in angles.terms()])
