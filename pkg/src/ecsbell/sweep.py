"""Figure-reproduction runners behind the CLI subcommands.

Each runner turns a :class:`SweepConfig` into a :class:`RunRecord`. Per-point
work lives in module-level functions taking plain tuples, so it can be mapped
over a process pool; results are always collected in grid order.
"""
from __future__ import annotations

import math
import time

import numpy as np

from ecsbell import bw, ecs, gate
from ecsbell.config import SweepConfig
from ecsbell.ecs import AngleSettings, EcsSpec
from ecsbell.record import CheckResult, RunRecord

TSIRELSON_SLACK = 1e-9
DISCREPANCY_TOL = 1e-8


def _mapper(executor):
    return map if executor is None else executor.map


def _angles(theta, angles):
    return ecs.canonical_angles(theta) if angles is None else AngleSettings(*angles)


def _dims(dim):
    return None if dim is None else (dim, dim)


def _timed(fn, args):
    t0 = time.perf_counter()
    out = fn(args)
    return out, time.perf_counter() - t0


def crossing(xs, ys, level: float, start: int = 0, upward: bool = True):
    """First crossing of ``level`` at or after index ``start``, linearly interpolated."""
    for i in range(start, len(xs) - 1):
        y0, y1 = ys[i] - level, ys[i + 1] - level
        hit = (y0 < 0 <= y1) if upward else (y0 > 0 >= y1)
        if hit:
            return xs[i] + (xs[i + 1] - xs[i]) * (-y0) / (y1 - y0)
    return math.nan


def detect_thresholds(alphas, s_rp, s_bw=None) -> dict:
    """Minimum of ``S_RP``, its upward crossing of 2 and the point past which ``S_RP > S_BW``."""
    a = np.asarray(alphas, dtype=float)
    s = np.asarray(s_rp, dtype=float)
    i_min = int(np.argmin(s))
    out = {
        "s_rp_min_alpha": float(a[i_min]),
        "s_rp_min_value": float(s[i_min]),
        "s_rp_decreasing_to_min": bool(np.all(np.diff(s[: i_min + 1]) < 0)),
        "s_rp_crosses_2_at": float(crossing(a, s, 2.0, start=i_min)),
    }
    if s_bw is not None:
        d = s - np.asarray(s_bw, dtype=float)
        if np.all(np.isnan(d)):
            out["s_rp_exceeds_s_bw_from"] = math.nan
        elif d[-1] <= 0:
            out["s_rp_exceeds_s_bw_from"] = math.nan
        else:
            # last non-positive point; S_RP - S_BW > 0 everywhere after it
            bad = np.nonzero(~(d > 0))[0]
            if bad.size == 0:
                out["s_rp_exceeds_s_bw_from"] = float(a[0])
            else:
                i = int(bad[-1])
                out["s_rp_exceeds_s_bw_from"] = float(a[i] + (a[i + 1] - a[i]) * (-d[i]) / (d[i + 1] - d[i]))
    return out


# --- correlations ---------------------------------------------------------

CORRELATION_COLUMNS = ("alpha1", "alpha2", "E11", "E12", "E21", "E22", "M11", "M12", "M21", "M22",
                       "S_ecs", "S_mixture", "max_discrepancy", "dim1", "dim2")


def correlation_point(args):
    a1, a2, theta, angles, dim = args
    spec = EcsSpec(a1, a2, theta)
    terms = _angles(theta, angles).terms()
    ecs_vals, disc, dims = [], 0.0, None
    for p, q, _ in terms:
        rep = ecs.correlation_numeric(spec, p, q, dims=_dims(dim))
        ecs_vals.append(rep.value_analytic)
        disc = max(disc, rep.discrepancy)
        dims = rep.truncation_dim
    mix = [ecs.correlation_mixture(spec, p, q) for p, q, _ in terms]
    return (a1, a2, *ecs_vals, *mix, ecs.chsh(ecs_vals), ecs.chsh(mix), disc, dims[0], dims[1])


def run_correlations(config: SweepConfig, executor=None) -> RunRecord:
    """Canonical-angle correlations for the ECS and the classical mixture, per alpha."""
    pairs = config.pairs()
    jobs = [(a1, a2, config.theta, config.angles, config.dim) for a1, a2 in pairs]
    out = list(_mapper(executor)(_timed, [correlation_point] * len(jobs), jobs))
    rec = RunRecord("correlations", config.echo(), CORRELATION_COLUMNS,
                    [r for r, _ in out], timings=[t for _, t in out])
    s_ecs, s_mix = rec.column("S_ecs"), rec.column("S_mixture")
    disc = max(rec.column("max_discrepancy"))
    rec.checks += [
        CheckResult("tsirelson_bound", max(s_ecs) <= ecs.TSIRELSON + TSIRELSON_SLACK, max(s_ecs), ecs.TSIRELSON),
        CheckResult("mixture_local_bound", max(s_mix) <= 2.0 + TSIRELSON_SLACK, max(s_mix), 2.0),
        CheckResult("analytic_vs_numeric", disc <= DISCREPANCY_TOL, disc, DISCREPANCY_TOL),
    ]
    rec.footer.update({"max_S_ecs": max(s_ecs), "max_S_mixture": max(s_mix),
                       "max_correlation_discrepancy": disc})
    return rec


# --- bell sweep / grid ----------------------------------------------------

SWEEP_COLUMNS = ("alpha1", "alpha2", "S_RP", "S_RP_numeric", "S_BW", "S_BW_converged",
                 "concurrence", "dim1", "dim2")
GRID_COLUMNS = ("alpha1", "alpha2", "S_RP", "S_RP_numeric", "concurrence", "dim1", "dim2")


def sweep_point(args):
    a1, a2, theta, angles, dim, optimize, restarts, seed, max_iter, real_only = args
    spec = EcsSpec(a1, a2, theta)
    ang = _angles(theta, angles)
    s_rp = ecs.bell_signal_rp(spec, ang)
    dims = (dim, dim) if dim is not None else spec.default_dims()
    s_num = ecs.bell_signal_rp(spec, ang, method="numeric", dims=dims)
    if optimize:
        res = bw.optimize_bw(spec, restarts=restarts, seed=seed, real_only=real_only, max_iter=max_iter)
        s_bw, ok = res.best_signal, int(res.converged)
    else:
        s_bw, ok = math.nan, 0
    return (a1, a2, s_rp, s_num, s_bw, ok, ecs.concurrence(spec), dims[0], dims[1])


def grid_point(args):
    a1, a2, theta, angles, dim = args
    spec = EcsSpec(a1, a2, theta)
    ang = _angles(theta, angles)
    dims = (dim, dim) if dim is not None else spec.default_dims()
    return (a1, a2, ecs.bell_signal_rp(spec, ang), ecs.bell_signal_rp(spec, ang, method="numeric", dims=dims),
            ecs.concurrence(spec), dims[0], dims[1])


def _signal_checks(rec, names):
    checks = []
    for name in names:
        vals = [v for v in rec.column(name) if not math.isnan(v)]
        if vals:
            checks.append(CheckResult(f"tsirelson_bound[{name}]", max(vals) <= ecs.TSIRELSON + TSIRELSON_SLACK,
                                      max(vals), ecs.TSIRELSON))
    diff = max(abs(a - b) for a, b in zip(rec.column("S_RP"), rec.column("S_RP_numeric")))
    checks.append(CheckResult("analytic_vs_numeric", diff <= DISCREPANCY_TOL, diff, DISCREPANCY_TOL))
    return checks


def run_bell_sweep(config: SweepConfig, executor=None) -> RunRecord:
    """``S_RP`` and optimized ``S_BW`` along the alpha line, with detected thresholds.

    In bell-grid mode this evaluates ``S_RP`` on the ``alpha1 x alpha2`` grid instead.
    """
    if config.mode == "bell-grid":
        return run_bell_grid(config, executor)
    pairs = config.pairs()
    jobs = [(a1, a2, config.theta, config.angles, config.dim, config.optimize, config.restarts,
             config.seed, config.max_iter, config.real_only) for a1, a2 in pairs]
    out = list(_mapper(executor)(_timed, [sweep_point] * len(jobs), jobs))
    rec = RunRecord(config.mode, config.echo(), SWEEP_COLUMNS, [r for r, _ in out],
                    timings=[t for _, t in out])
    rec.checks += _signal_checks(rec, ("S_RP", "S_BW"))
    if len(pairs) >= 3:
        s_bw = rec.column("S_BW") if config.optimize else None
        rec.footer.update(detect_thresholds(rec.column("alpha1"), rec.column("S_RP"), s_bw))
    if config.optimize:
        rec.footer["unconverged_points"] = sum(1 for v in rec.column("S_BW_converged") if not v)
    return rec


def run_bell_grid(config: SweepConfig, executor=None) -> RunRecord:
    pairs = config.pairs()
    jobs = [(a1, a2, config.theta, config.angles, config.dim) for a1, a2 in pairs]
    out = list(_mapper(executor)(_timed, [grid_point] * len(jobs), jobs))
    rec = RunRecord("bell-grid", config.echo(), GRID_COLUMNS, [r for r, _ in out],
                    timings=[t for _, t in out])
    rec.checks += _signal_checks(rec, ("S_RP",))
    s = rec.column("S_RP")
    i = int(np.argmax(s))
    rec.footer.update({"max_S_RP": s[i], "argmax_alpha1": rec.rows[i][0], "argmax_alpha2": rec.rows[i][1],
                       "points_above_2": sum(1 for v in s if v > 2.0)})
    return rec


# --- bw optimize ----------------------------------------------------------

BW_COLUMNS = ("alpha1", "alpha2", "S_BW", "S_BW_operator", "discrepancy", "converged", "nfev",
              "re_beta1", "im_beta1", "re_beta2", "im_beta2",
              "re_beta1p", "im_beta1p", "re_beta2p", "im_beta2p", "dim1", "dim2")


def run_bw_optimize(config: SweepConfig, executor=None) -> RunRecord:
    """Optimize the displaced-parity signal per point; restarts go to the pool."""
    rows, timings = [], []
    for a1, a2 in config.pairs():
        t0 = time.perf_counter()
        spec = EcsSpec(a1, a2, config.theta)
        res = bw.optimize_bw(spec, restarts=config.restarts, seed=config.seed,
                             real_only=config.real_only, max_iter=config.max_iter, executor=executor)
        st = res.best_settings
        dims = _dims(config.dim) or bw._bw_dims(spec, [st.beta1, st.beta1p], [st.beta2, st.beta2p])
        s_op = bw.bell_signal_bw(spec, st, method="operator", dims=dims)
        rows.append((a1, a2, res.best_signal, s_op, abs(s_op - res.best_signal), int(res.converged),
                     res.nfev, *st.to_params(), dims[0], dims[1]))
        timings.append(time.perf_counter() - t0)
    rec = RunRecord("bw-optimize", config.echo(), BW_COLUMNS, rows, timings=timings)
    vals = rec.column("S_BW")
    disc = max(rec.column("discrepancy"))
    rec.checks += [
        CheckResult("tsirelson_bound[S_BW]", max(vals) <= ecs.TSIRELSON + TSIRELSON_SLACK, max(vals), ecs.TSIRELSON),
        CheckResult("operator_vs_closed_form", disc <= DISCREPANCY_TOL, disc, DISCREPANCY_TOL),
    ]
    rec.footer.update({"max_S_BW": max(vals),
                       "unconverged_points": sum(1 for v in rec.column("converged") if not v)})
    return rec


# --- gate fidelity --------------------------------------------------------

GATE_COLUMNS = ("t", "fidelity", "dim")


def run_gate_fidelity(config: SweepConfig, executor=None) -> RunRecord:
    """``F(t) = |<psi(0)|psi(t)>|^2`` for the dispersive pulse on ``|g>|2 alpha>``."""
    t0 = time.perf_counter()
    params = gate.pulse_for_phase(config.phi, config.omega * config.chi, chi=config.chi)
    psi0 = gate.initial_state(config.gate_alpha, config.dim)
    ts = gate.time_grid(params, config.points)
    states = gate.propagate(params, psi0, ts, method=config.method)
    fid = [abs(psi0.inner(s)) ** 2 for s in states]
    final = states[-1]
    target_g = psi0.g.copy()
    target_g[0] *= np.exp(1j * params.phi)
    err = max(0.0, 1.0 - abs(gate.QubitOscState.from_parts(target_g).inner(final)) ** 2)
    period = gate.oscillation_period(ts, fid, config.chi)
    rows = [(float(t), float(f), psi0.dim) for t, f in zip(ts, fid)]
    rec = RunRecord("gate-fidelity", config.echo(), GATE_COLUMNS, rows, timings=[time.perf_counter() - t0])
    nominal = 2 * math.pi / abs(config.chi)
    rec.footer.update({
        "delta": params.delta, "tau": params.tau, "regime_ratio": params.regime_ratio,
        "in_regime": params.in_regime, "final_fidelity": fid[-1], "oscillation_period": period,
        "nominal_period": nominal, "period_relative_error": abs(period - nominal) / nominal,
        "phase_gate_error": err,
    })
    rec.checks += [
        CheckResult("initial_fidelity", abs(fid[0] - 1.0) <= 1e-12, abs(fid[0] - 1.0), 1e-12, psi0.dim),
        CheckResult("fidelity_in_unit_interval", max(fid) <= 1 + 1e-9 and min(fid) >= -1e-12,
                    max(fid), 1.0, psi0.dim),
    ]
    return rec


# --- dispatch -------------------------------------------------------------

def run(config: SweepConfig, executor=None) -> RunRecord:
    from ecsbell.verify import run_verify

    runners = {"correlations": run_correlations, "bell-sweep": run_bell_sweep, "bell-grid": run_bell_grid,
               "bw-optimize": run_bw_optimize, "gate-fidelity": run_gate_fidelity, "verify": run_verify}
    return runners[config.mode](config, executor)
