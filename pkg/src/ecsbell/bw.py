"""Displaced-parity (Banaszek-Wodkiewicz type) Bell test and its optimization.

Correlations ``<D(b1) P D(b1)^dag x D(b2) P D(b2)^dag>`` on the ECS have a
closed form in coherent-state overlaps, because ``D(b) P D(b)^dag = D(2b) P``
and ``P|g> = |-g>``. That closed form lives in the compiled kernel and is the
fast objective for the optimizer; the truncated-operator route is kept as the
slow cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from ecsbell import fock, kernels
from ecsbell.ecs import EcsSpec, build_ecs, chsh
from ecsbell.fock import FockSpace

DEFAULT_SEED = 20190412
DEFAULT_RESTARTS = 32
SIMPLEX_TOL = 1e-9
MAX_ITER = 5000
# Restart k starts from a Latin-hypercube simplex in a box shrunk by 2**-(k % N_SCALES).
N_SCALES = 8


@dataclass(frozen=True)
class DisplacementSettings:
    beta1: complex
    beta2: complex
    beta1p: complex
    beta2p: complex

    def to_params(self) -> np.ndarray:
        out = np.empty(8)
        for i, b in enumerate((self.beta1, self.beta2, self.beta1p, self.beta2p)):
            out[2 * i], out[2 * i + 1] = complex(b).real, complex(b).imag
        return out

    @classmethod
    def from_params(cls, p) -> "DisplacementSettings":
        p = np.asarray(p, dtype=float)
        return cls(*(complex(p[2 * i], p[2 * i + 1]) for i in range(4)))

    def terms(self):
        return ((self.beta1, self.beta2, 1.0), (self.beta1, self.beta2p, 1.0),
                (self.beta1p, self.beta2, 1.0), (self.beta1p, self.beta2p, -1.0))


@dataclass(frozen=True)
class OptimizationResult:
    best_signal: float
    best_settings: DisplacementSettings
    restarts_used: int
    converged: bool
    restart_signals: tuple[float, ...] = field(default=())
    nfev: int = 0


def bw_correlation_closed_form(spec: EcsSpec, beta1: complex, beta2: complex) -> float:
    """Displaced-parity correlation from coherent-state overlaps (no truncation)."""
    return float(kernels.bw_correlation(complex(beta1), complex(beta2),
                                        spec.alpha1, spec.alpha2, spec.theta))


def _bw_dims(spec, betas1, betas2):
    a1 = abs(spec.alpha1) + max(abs(b) for b in betas1)
    a2 = abs(spec.alpha2) + max(abs(b) for b in betas2)
    return fock.required_dim(a1), fock.required_dim(a2)


class _OperatorPath:
    def __init__(self, spec, dims):
        self.s1, self.s2 = FockSpace(dims[0]), FockSpace(dims[1])
        self.psi = build_ecs(spec, self.s1, self.s2).as_tensor()
        self.p1 = np.where(np.arange(self.s1.dim) % 2 == 0, 1.0, -1.0)
        self.p2 = np.where(np.arange(self.s2.dim) % 2 == 0, 1.0, -1.0)

    def correlation(self, beta1, beta2):
        d1 = fock.displacement_operator(self.s1, beta1).matrix
        d2 = fock.displacement_operator(self.s2, beta2).matrix
        # <psi| D P D^dag x D P D^dag |psi> = <phi|P x P|phi>, phi = D^dag x D^dag psi
        phi = d1.conj().T @ self.psi @ d2.conj()
        return float(np.vdot(phi, self.p1[:, None] * phi * self.p2[None, :]).real)


def bw_correlation(spec: EcsSpec, beta1: complex, beta2: complex, dims=None) -> float:
    """Displaced-parity correlation through truncated operators.

    The default truncation covers ``|a_j| + |b_j|`` per mode.
    """
    if dims is None:
        dims = _bw_dims(spec, [beta1], [beta2])
    elif isinstance(dims, int):
        dims = (dims, dims)
    return _OperatorPath(spec, dims).correlation(complex(beta1), complex(beta2))


def bell_signal_bw(spec: EcsSpec, settings: DisplacementSettings, method: str = "closed_form",
                   dims=None) -> float:
    """CHSH combination of displaced-parity correlations for one settings choice."""
    if method == "closed_form":
        return float(kernels.bw_signal(settings.to_params(), spec.alpha1, spec.alpha2, spec.theta))
    if method != "operator":
        raise ValueError(f"unknown method {method!r}")
    if dims is None:
        dims = _bw_dims(spec, [settings.beta1, settings.beta1p], [settings.beta2, settings.beta2p])
    elif isinstance(dims, int):
        dims = (dims, dims)
    path = _OperatorPath(spec, dims)
    return chsh([path.correlation(complex(a), complex(b)) for a, b, _ in settings.terms()])


def search_box(spec: EcsSpec) -> float:
    """Half-width of the box on every Re/Im displacement component."""
    return 2.0 * max(abs(spec.alpha1), abs(spec.alpha2)) + 2.0


def initial_simplex(spec: EcsSpec, restart: int, seed: int = DEFAULT_SEED, real_only: bool = False):
    """Latin-hypercube simplex for one restart; depends only on ``(seed, restart)``."""
    ndim = 4 if real_only else 8
    rng = np.random.default_rng([seed, restart])
    scale = search_box(spec) * 0.5 ** (restart % N_SCALES)
    pts = qmc.LatinHypercube(d=ndim, seed=rng).random(ndim + 1)
    return (2.0 * pts - 1.0) * scale


def _expand(x, real_only):
    if not real_only:
        return np.ascontiguousarray(x, dtype=np.float64)
    p = np.zeros(8)
    p[0::2] = x
    return p


def _run_restart(args):
    alpha1, alpha2, theta, restart, seed, real_only, box, max_iter, tol = args
    signal = kernels.bw_signal

    def objective(x):
        return -signal(_expand(x, real_only), alpha1, alpha2, theta)

    spec = EcsSpec(alpha1, alpha2, theta)
    simplex = initial_simplex(spec, restart, seed, real_only)
    ndim = simplex.shape[1]
    res = minimize(objective, simplex[0], method="Nelder-Mead",
                   bounds=[(-box, box)] * ndim,
                   options={"initial_simplex": simplex, "xatol": tol, "fatol": tol,
                            "maxiter": max_iter, "maxfev": 4 * max_iter, "adaptive": True})
    return -float(res.fun), _expand(res.x, real_only), bool(res.success), int(res.nfev)


def optimize_bw(spec: EcsSpec, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED,
                real_only: bool = False, max_iter: int = MAX_ITER, tol: float = SIMPLEX_TOL,
                executor=None) -> OptimizationResult:
    """Maximize the displaced-parity Bell signal over the four displacements.

    Multi-start Nelder-Mead on the 8 real parameters (or the 4 real parts when
    ``real_only``) inside the search box. Restarts are independent and can be
    mapped over ``executor``; the reduction keeps the first maximum, so the
    result does not depend on scheduling. ``converged`` is False when the
    winning restart hit the iteration cap before meeting the simplex tolerance.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    box = search_box(spec)
    jobs = [(spec.alpha1, spec.alpha2, spec.theta, k, seed, real_only, box, max_iter, tol)
            for k in range(restarts)]
    mapper = map if executor is None else executor.map
    results = list(mapper(_run_restart, jobs))
    best = max(range(restarts), key=lambda k: (results[k][0], -k))
    value, params, ok, _ = results[best]
    return OptimizationResult(value, DisplacementSettings.from_params(params), restarts, ok,
                              tuple(r[0] for r in results), sum(r[3] for r in results))


def tsirelson_margin(result: OptimizationResult) -> float:
    return 2.0 * math.sqrt(2.0) - result.best_signal
