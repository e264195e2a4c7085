"""Oracle cross-check suite run by ``ecsbell verify``.

Every check compares two independent routes to the same number, or tests a
bound that must hold exactly. A :class:`TruncationError` inside a check is
reported as a failure of that check with status ``truncation`` rather than
aborting the suite.
"""
from __future__ import annotations

import math
import time

import numpy as np

from ecsbell import bw, ecs, fock, gate
from ecsbell.config import SweepConfig
from ecsbell.ecs import AngleSettings, EcsSpec
from ecsbell.errors import TruncationError
from ecsbell.record import CheckResult, RunRecord

CORRELATION_TOL = 1e-8
BW_TOL = 1e-8
GATE_TOL = 1e-6
CONVERGENCE_TOL = 1e-8
PHASE_TOL = 1e-8
BOUND_SLACK = 1e-12
ROTATION_FIDELITY_MIN = 0.999
UNITARY_TOL = 1e-10

ALPHA_MAX = 2.0
BETA_MAX = 1.5

VERIFY_COLUMNS = ("check", "status", "measured", "tolerance", "dim")


def _random_spec(rng, alpha_max=ALPHA_MAX):
    while True:
        a1, a2 = rng.uniform(0.0, alpha_max, 2)
        theta = rng.uniform(0.0, 2 * math.pi)
        if 2 + 2 * math.cos(theta) * math.exp(-2 * (a1 * a1 + a2 * a2)) > 1e-3:
            return EcsSpec(a1, a2, theta)


def _random_angles(rng):
    return AngleSettings(*rng.uniform(-math.pi, math.pi, 4))


def _random_beta(rng, scale=BETA_MAX):
    r = scale * math.sqrt(rng.uniform())
    return complex(r * math.cos(t := rng.uniform(0, 2 * math.pi)), r * math.sin(t))


def check_correlations(rng, n):
    worst, dim = 0.0, 0
    for _ in range(n):
        spec = _random_spec(rng)
        phi1, phi2 = rng.uniform(-math.pi, math.pi, 2)
        rep = ecs.correlation_numeric(spec, phi1, phi2)
        worst = max(worst, rep.discrepancy)
        dim = max(dim, *rep.truncation_dim)
    return CheckResult("correlation_analytic_vs_numeric", worst <= CORRELATION_TOL, worst, CORRELATION_TOL, dim)


def check_bw_oracle(rng, n):
    worst, dim = 0.0, 0
    for _ in range(n):
        spec = _random_spec(rng)
        b1, b2 = _random_beta(rng), _random_beta(rng)
        dims = bw._bw_dims(spec, [b1], [b2])
        diff = abs(bw.bw_correlation(spec, b1, b2, dims) - bw.bw_correlation_closed_form(spec, b1, b2))
        worst, dim = max(worst, diff), max(dim, *dims)
    return CheckResult("bw_operator_vs_overlap", worst <= BW_TOL, worst, BW_TOL, dim)


def check_gate_closed_form(rng, n):
    worst = 0.0
    vac = gate.QubitOscState.from_parts([1.0])
    for _ in range(n):
        omega = rng.uniform(0.02, 0.3)
        phi = rng.choice([-1, 1]) * rng.uniform(0.1, 2 * math.pi - 0.1)
        params = gate.pulse_for_phase(phi, omega)
        ts = gate.time_grid(params, 64)
        states = gate.propagate(params, vac, ts, method="rk4")
        for t, s in zip(ts, states):
            worst = max(worst, float(np.abs(s.amps - gate.vacuum_evolution_closed_form(params, t).amps).max()))
    return CheckResult("integrator_vs_closed_form", worst <= GATE_TOL, worst, GATE_TOL, 1)


def check_truncation_convergence(rng, n):
    worst, dim = 0.0, 0
    for _ in range(n):
        spec = _random_spec(rng)
        phi1, phi2 = rng.uniform(-math.pi, math.pi, 2)
        d1, d2 = spec.default_dims()
        a = ecs.correlation_numeric(spec, phi1, phi2, dims=(d1, d2)).value_numeric
        b = ecs.correlation_numeric(spec, phi1, phi2, dims=(d1 + 10, d2 + 10)).value_numeric
        b1, b2 = _random_beta(rng), _random_beta(rng)
        e1, e2 = bw._bw_dims(spec, [b1], [b2])
        c = bw.bw_correlation(spec, b1, b2, (e1, e2))
        d = bw.bw_correlation(spec, b1, b2, (e1 + 10, e2 + 10))
        worst = max(worst, abs(a - b), abs(c - d))
        dim = max(dim, d1 + 10, d2 + 10, e1 + 10, e2 + 10)
    return CheckResult("truncation_convergence", worst <= CONVERGENCE_TOL, worst, CONVERGENCE_TOL, dim)


def check_tsirelson(rng, n):
    worst = 0.0
    for _ in range(n):
        spec = _random_spec(rng)
        worst = max(worst, ecs.bell_signal_rp(spec, _random_angles(rng)))
        st = bw.DisplacementSettings(*(_random_beta(rng) for _ in range(4)))
        worst = max(worst, bw.bell_signal_bw(spec, st))
    return CheckResult("tsirelson_bound", worst <= ecs.TSIRELSON + BOUND_SLACK, worst, ecs.TSIRELSON)


def check_mixture(rng, n):
    worst = 0.0
    for _ in range(n):
        worst = max(worst, ecs.bell_signal_mixture(_random_spec(rng), _random_angles(rng)))
    return CheckResult("mixture_local_bound", worst <= 2.0 + BOUND_SLACK, worst, 2.0)


def check_phase_independence(rng, n):
    worst, dim = 0.0, 0
    for _ in range(n):
        spec = _random_spec(rng)
        c1, c2 = rng.uniform(0, 2 * math.pi, 2)
        rotated = EcsSpec(spec.alpha1 * np.exp(1j * c1), spec.alpha2 * np.exp(1j * c2), spec.theta)
        phi1, phi2 = rng.uniform(-math.pi, math.pi, 2)
        a = ecs.correlation_numeric(spec, phi1, phi2)
        b = ecs.correlation_numeric(rotated, phi1, phi2)
        worst = max(worst, abs(a.value_numeric - b.value_numeric))
        dim = max(dim, *b.truncation_dim)
    return CheckResult("phase_independence", worst <= PHASE_TOL, worst, PHASE_TOL, dim)


def rotation_overlap(alpha: complex, phi: float, dim: int | None = None) -> float:
    """``|<a|R_z(phi)|a>|^2`` for a normalized coherent state."""
    space = fock.FockSpace(dim if dim is not None else fock.required_dim(2 * alpha))
    ket = fock.coherent_state(space, alpha)
    r = fock.rotation_z(space, alpha, phi)
    return abs(ket.inner(r @ ket)) ** 2


def check_rotation_overlap():
    alpha = math.sqrt(2.0)
    value = rotation_overlap(alpha, math.pi / 4)
    return CheckResult("rotation_overlap", value > ROTATION_FIDELITY_MIN, value, ROTATION_FIDELITY_MIN,
                       fock.required_dim(2 * alpha))


def check_operator_invariants(rng, n):
    worst_u, worst_h, dim = 0.0, 0.0, 0
    for _ in range(n):
        a = _random_beta(rng, ALPHA_MAX)
        space = fock.FockSpace(fock.required_dim(2 * a))
        d = fock.displacement_operator(space, a)
        rp = ecs.rotated_parity(space, a, rng.uniform(-math.pi, math.pi))
        worst_u = max(worst_u, d.unitarity_defect(), rp.unitarity_defect())
        worst_h = max(worst_h, rp.hermiticity_defect())
        dim = max(dim, space.dim)
    ok = worst_u <= UNITARY_TOL and worst_h <= fock.HERMITIAN_TOL
    return CheckResult("operator_invariants", ok, max(worst_u, worst_h), UNITARY_TOL, dim)


def check_configured_points(config: SweepConfig):
    """Correlations at the configured alphas, honoring the ``dim`` override."""
    alphas = config.pairs() if (config.alpha or config.alpha1 or config.alpha2) else [(2.0, 2.0)]
    angles = ecs.canonical_angles(config.theta) if config.angles is None else AngleSettings(*config.angles)
    dims = None if config.dim is None else (config.dim, config.dim)
    worst, dim = 0.0, 0
    for a1, a2 in alphas:
        spec = EcsSpec(a1, a2, config.theta)
        for p, q, _ in angles.terms():
            rep = ecs.correlation_numeric(spec, p, q, dims=dims)
            worst, dim = max(worst, rep.discrepancy), max(dim, *rep.truncation_dim)
    return CheckResult("configured_points", worst <= CORRELATION_TOL, worst, CORRELATION_TOL, dim)


def _guarded(fn, *args, name):
    try:
        return fn(*args)
    except TruncationError as exc:
        return CheckResult(name, False, math.nan, math.nan, exc.dim, status="truncation", detail=str(exc))


def run_verify(config: SweepConfig, executor=None) -> RunRecord:
    """Run every oracle check; randomized inputs come from ``config.seed``."""
    n = config.verify_points
    small = max(1, n // 10)
    suite = [
        ("configured_points", check_configured_points, (config,)),
        ("correlation_analytic_vs_numeric", check_correlations, (n,)),
        ("bw_operator_vs_overlap", check_bw_oracle, (max(1, n // 4),)),
        ("integrator_vs_closed_form", check_gate_closed_form, (max(1, n // 40),)),
        ("truncation_convergence", check_truncation_convergence, (small,)),
        ("tsirelson_bound", check_tsirelson, (n,)),
        ("mixture_local_bound", check_mixture, (n,)),
        ("phase_independence", check_phase_independence, (small,)),
        ("rotation_overlap", check_rotation_overlap, ()),
        ("operator_invariants", check_operator_invariants, (small,)),
    ]
    rec = RunRecord("verify", config.echo(), VERIFY_COLUMNS)
    for k, (name, fn, args) in enumerate(suite):
        t0 = time.perf_counter()
        if args and not isinstance(args[0], SweepConfig):
            args = (np.random.default_rng([config.seed, k]), *args)
        check = _guarded(fn, *args, name=name)
        rec.timings.append(time.perf_counter() - t0)
        rec.checks.append(check)
        rec.rows.append((check.name, check.status, check.measured, check.tolerance, check.dim))
    rec.footer["checks_passed"] = sum(c.passed for c in rec.checks)
    rec.footer["checks_total"] = len(rec.checks)
    failing = [c.name for c in rec.failures]
    rec.footer["failing_checks"] = ",".join(failing) if failing else "none"
    return rec
