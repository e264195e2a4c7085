"""Truncated Fock-space linear algebra.

States and operators are dense numpy arrays with a tuple of per-mode
dimensions attached. Multi-mode objects are flattened with the first mode as
the slowest index (C order), so a two-mode ket reshaped to ``(d1, d2)`` has
mode 1 along rows and mode 2 along columns.

Truncation is controlled by a Poisson tail criterion: a coherent amplitude
``A`` is admitted into a space of dimension ``d`` only if the probability
mass of ``|A>`` on levels ``n >= d`` is at most ``TAIL_TOL``.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special, stats

from ecsbell import kernels
from ecsbell.errors import DimensionError, TruncationError

TAIL_TOL = 1e-12
EDGE_BUFFER = 5
MAX_PRODUCT_DIM = 1 << 16
NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12


def required_dim(amplitude: complex) -> int:
    """Default truncation ``ceil(|A|^2 + 10|A| + 20)`` for the largest amplitude A."""
    a = abs(amplitude)
    return int(math.ceil(a * a + 10.0 * a + 20.0))


def poisson_tail(dim: int, amplitude: complex) -> float:
    """Mass of the coherent state ``|A>`` on Fock levels ``n >= dim``."""
    mean = abs(amplitude) ** 2
    if dim <= 0:
        return 1.0
    if mean == 0.0:
        return 0.0
    return float(stats.poisson.sf(dim - 1, mean))


def faithful_levels(dim: int, amplitude: complex) -> int:
    """Number of leading levels on which a truncated ``D(A)`` acts faithfully.

    Level ``n`` counts when the truncation rule evaluated at the effective
    amplitude ``sqrt(n) + |A|`` (the outer radius of the displaced number
    state) fits inside ``dim``.
    """
    a = abs(amplitude)
    count = 0
    for n in range(dim):
        if required_dim(math.sqrt(n) + a) > dim:
            break
        count += 1
    return count


@dataclass(frozen=True)
class FockSpace:
    """Fock levels ``|0>, ..., |dim-1>`` of a single bosonic mode."""

    dim: int

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, (int, np.integer)):
            raise TypeError(f"dim must be an integer, got {self.dim!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    @classmethod
    def for_amplitude(cls, *amplitudes: complex) -> "FockSpace":
        """Space sized by the default truncation rule for the largest amplitude."""
        return cls(max(required_dim(a) for a in amplitudes) if amplitudes else required_dim(0))

    def tail(self, amplitude: complex, buffer: int = 0) -> float:
        return poisson_tail(self.dim - buffer, amplitude)

    def admits(self, amplitude: complex, buffer: int = 0) -> bool:
        return self.tail(amplitude, buffer) <= TAIL_TOL

    def check(self, amplitude: complex, buffer: int = 0) -> None:
        """Raise :class:`TruncationError` unless ``amplitude`` passes the tail criterion."""
        tail = self.tail(amplitude, buffer)
        if tail > TAIL_TOL:
            raise TruncationError(amplitude, self.dim, required_dim(amplitude) + buffer, tail)


def _as_dims(dims) -> tuple[int, ...]:
    if isinstance(dims, FockSpace):
        return (dims.dim,)
    if isinstance(dims, (int, np.integer)):
        return (int(dims),)
    return tuple(d.dim if isinstance(d, FockSpace) else int(d) for d in dims)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Ket over a (product of) truncated Fock space(s).

    ``normalized=False`` marks intermediates whose norm is not checked.
    """

    amps: np.ndarray
    dims: tuple[int, ...]
    normalized: bool = True

    def __post_init__(self):
        dims = _as_dims(self.dims)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size != math.prod(dims):
            raise DimensionError(f"{amps.size} amplitudes do not match dims {dims}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)
        if self.normalized:
            defect = abs(self.norm() - 1.0)
            if defect > NORM_TOL:
                raise ValueError(f"state flagged normalized has norm defect {defect:.3e}")

    @property
    def spaces(self) -> tuple[FockSpace, ...]:
        return tuple(FockSpace(d) for d in self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        return StateVector(self.amps / self.norm(), self.dims)

    def as_tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode."""
        return self.amps.reshape(self.dims)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        if self.dims != other.dims:
            raise DimensionError(f"dims {self.dims} and {other.dims} differ")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Dense operator on a (product of) truncated Fock space(s).

    ``buffer`` is the number of top levels per mode that truncation may
    corrupt; unitarity is only promised on the complementary leading block.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    hermitian: bool = False
    unitary: bool = False
    buffer: int = field(default=EDGE_BUFFER)

    def __post_init__(self):
        dims = _as_dims(self.dims)
        m = np.array(self.matrix, dtype=np.complex128)
        n = math.prod(dims)
        if m.shape != (n, n):
            raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)
        if self.hermitian and self.hermiticity_defect() > HERMITIAN_TOL:
            raise ValueError(f"operator flagged Hermitian has defect {self.hermiticity_defect():.3e}")

    def dag(self) -> "DenseOperator":
        return DenseOperator(self.matrix.conj().T, self.dims, self.hermitian, self.unitary, self.buffer)

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            if other.dims != self.dims:
                raise DimensionError(f"dims {self.dims} and {other.dims} differ")
            return DenseOperator(self.matrix @ other.matrix, self.dims,
                                 unitary=self.unitary and other.unitary,
                                 buffer=max(self.buffer, other.buffer))
        if isinstance(other, StateVector):
            if other.dims != self.dims:
                raise DimensionError(f"dims {self.dims} and {other.dims} differ")
            return StateVector(self.matrix @ other.amps, self.dims, normalized=False)
        return NotImplemented

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def leading_block(self, buffer: int | None = None) -> np.ndarray:
        """Flat indices whose every mode index lies below ``dim - buffer``."""
        b = self.buffer if buffer is None else buffer
        grids = np.meshgrid(*[np.arange(d) for d in self.dims], indexing="ij")
        mask = np.ones(self.dims, dtype=bool)
        for g, d in zip(grids, self.dims):
            mask &= g < d - b
        return np.flatnonzero(mask.reshape(-1))

    def unitarity_defect(self, buffer: int | None = None) -> float:
        """``max |U^dag U - I|`` on the leading block (excluding ``buffer`` top levels)."""
        idx = self.leading_block(buffer)
        if idx.size == 0:
            return 0.0
        cols = self.matrix[:, idx]
        gram = cols.conj().T @ cols
        return float(np.abs(gram - np.eye(idx.size)).max())


def identity(space: FockSpace) -> DenseOperator:
    return DenseOperator(np.eye(space.dim), space.dim, hermitian=True, unitary=True, buffer=0)


def annihilation_operator(space: FockSpace) -> DenseOperator:
    return DenseOperator(np.diag(np.sqrt(np.arange(1, space.dim)), 1), space.dim, buffer=1)


def number_operator(space: FockSpace) -> DenseOperator:
    return DenseOperator(np.diag(np.arange(space.dim, dtype=float)), space.dim,
                         hermitian=True, buffer=0)


def basis_state(space: FockSpace, n: int) -> StateVector:
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[n] = 1.0
    return StateVector(amps, space.dim)


def coherent_amplitudes(dim: int, alpha: complex) -> np.ndarray:
    """Unnormalized truncated amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    alpha = complex(alpha)
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=np.complex128)
        out[0] = 1.0
        return out
    r, ang = abs(alpha), np.angle(alpha)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * special.gammaln(n + 1)
    return np.exp(logmag + 1j * ang * n)


def coherent_state(space: FockSpace, alpha: complex) -> StateVector:
    """Coherent state ``|alpha>`` truncated to ``space`` and renormalized.

    Raises :class:`TruncationError` when the discarded tail exceeds ``TAIL_TOL``.
    """
    space.check(alpha)
    amps = coherent_amplitudes(space.dim, alpha)
    return StateVector(amps / np.linalg.norm(amps), space.dim)


def coherent_overlap(beta: complex, gamma: complex) -> complex:
    """Exact ``<beta|gamma> = exp(-|b|^2/2 - |g|^2/2 + conj(b) g)``."""
    beta, gamma = complex(beta), complex(gamma)
    return complex(np.exp(-0.5 * abs(beta) ** 2 - 0.5 * abs(gamma) ** 2 + beta.conjugate() * gamma))


def displacement_operator(space: FockSpace, alpha: complex) -> DenseOperator:
    """``D(alpha)`` from exact matrix elements (Laguerre form), truncated to ``space``."""
    space.check(alpha, buffer=EDGE_BUFFER)
    mat = kernels.displacement_matrix(space.dim, complex(alpha))
    buffer = max(EDGE_BUFFER, space.dim - faithful_levels(space.dim, alpha))
    return DenseOperator(mat, space.dim, unitary=True, buffer=buffer)


def displacement_operator_expm(space: FockSpace, alpha: complex, pad: int | None = None) -> DenseOperator:
    """``D(alpha)`` by exponentiating the truncated generator ``alpha a^dag - conj(alpha) a``.

    The generator is built on ``dim + pad`` levels and the leading ``dim`` block
    is returned; ``pad=0`` gives an exactly unitary but edge-corrupted matrix.
    Used as an independent check of :func:`displacement_operator`.
    """
    if pad is None:
        pad = required_dim(alpha) + 2 * int(math.ceil(abs(alpha) * math.sqrt(space.dim)))
    n = space.dim + pad
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    alpha = complex(alpha)
    gen = alpha * a.T - alpha.conjugate() * a
    mat = linalg.expm(gen)[: space.dim, : space.dim]
    return DenseOperator(mat, space.dim, unitary=True,
                         buffer=EDGE_BUFFER if pad == 0 else max(EDGE_BUFFER, space.dim - faithful_levels(space.dim, alpha)))


def parity_operator(space: FockSpace) -> DenseOperator:
    """``(-1)^{a^dag a}``, exact in any truncation."""
    diag = np.where(np.arange(space.dim) % 2 == 0, 1.0, -1.0)
    return DenseOperator(np.diag(diag), space.dim, hermitian=True, unitary=True, buffer=0)


def phase_gate(space: FockSpace, phi: float) -> DenseOperator:
    """Phase ``e^{i phi}`` on the vacuum, identity on every ``|n>``, ``n >= 1``."""
    diag = np.ones(space.dim, dtype=np.complex128)
    diag[0] = np.exp(1j * phi)
    return DenseOperator(np.diag(diag), space.dim, unitary=True, buffer=0)


def rotation_z(space: FockSpace, alpha: complex, phi: float) -> DenseOperator:
    """Cat-qubit z rotation ``D^dag(alpha) G(phi) D(alpha)``."""
    d = displacement_operator(space, alpha)
    g = phase_gate(space, phi)
    return d.dag() @ g @ d


def tensor(a, b):
    """Kronecker product of two states or two operators (``a`` is the slow index)."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        dims = a.dims + b.dims
        _guard(dims)
        return StateVector(np.kron(a.amps, b.amps), dims, normalized=a.normalized and b.normalized)
    if isinstance(a, DenseOperator) and isinstance(b, DenseOperator):
        dims = a.dims + b.dims
        _guard(dims)
        return DenseOperator(np.kron(a.matrix, b.matrix), dims,
                             hermitian=a.hermitian and b.hermitian,
                             unitary=a.unitary and b.unitary,
                             buffer=max(a.buffer, b.buffer))
    raise TypeError("tensor() needs two StateVectors or two DenseOperators")


def _guard(dims):
    if math.prod(dims) > MAX_PRODUCT_DIM:
        raise DimensionError(f"product dimension {math.prod(dims)} exceeds {MAX_PRODUCT_DIM}")


def apply_local(state: StateVector, ops: Sequence) -> StateVector:
    """Apply one single-mode operator (or ``None`` for identity) per mode."""
    if len(ops) != len(state.dims):
        raise DimensionError(f"{len(ops)} factors for {len(state.dims)} modes")
    psi = state.as_tensor()
    for axis, op in enumerate(ops):
        if op is None:
            continue
        m = op.matrix if isinstance(op, DenseOperator) else np.asarray(op)
        if m.shape != (state.dims[axis],) * 2:
            raise DimensionError(f"factor {axis} has shape {m.shape}, mode dim {state.dims[axis]}")
        psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [axis])), 0, axis)
    return StateVector(psi.reshape(-1), state.dims, normalized=False)


def expectation(state: StateVector, op) -> complex:
    """``<psi|O|psi>``.

    ``op`` is either a :class:`DenseOperator` on the full space or a sequence
    of per-mode factors, which are applied to the ket one at a time so that
    product operators are never materialized.
    """
    if isinstance(op, DenseOperator):
        if op.dims != state.dims:
            raise DimensionError(f"operator dims {op.dims} vs state dims {state.dims}")
        return complex(np.vdot(state.amps, op.matrix @ state.amps))
    return complex(np.vdot(state.amps, apply_local(state, op).amps))


def partial_trace(state: StateVector, keep: int) -> DenseOperator:
    """Reduced density matrix of mode ``keep`` (1 or 2) of a two-mode pure state."""
    if len(state.dims) != 2:
        raise DimensionError("partial_trace needs a two-mode state")
    psi = state.as_tensor()
    if keep == 1:
        rho = psi @ psi.conj().T
    elif keep == 2:
        rho = psi.T @ psi.conj()
    else:
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return DenseOperator(rho, rho.shape[0], hermitian=True, buffer=0)
