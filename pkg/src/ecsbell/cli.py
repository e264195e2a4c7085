"""Command-line front end: ``ecsbell <subcommand> [flags]``.

Exit status: 0 success, 1 configuration error, 2 numerical check failure,
3 truncation error.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ecsbell import __version__
from ecsbell.config import MODES, ConfigError, load_config, parse_number, parse_range
from ecsbell.errors import DegenerateStateError, DomainError, EcsBellError, TruncationError
from ecsbell.output import write_csv, write_plot
from ecsbell.sweep import run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_TRUNCATION = 3


def _range_arg(text):
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _number_arg(text):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file; flags override its values")
    common.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    common.add_argument("--jobs", metavar="N", type=_positive_int,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--seed", metavar="N", type=int, help="seed for optimizer starts and random checks")
    common.add_argument("--dim", metavar="N", type=_positive_int, help="Fock truncation override per mode")
    common.add_argument("--plot", action="store_true", default=None, help="also write an SVG line plot")
    common.add_argument("--theta", metavar="X", type=_number_arg, help="relative phase of the ECS")
    common.add_argument("--alpha", metavar="RANGE", type=_range_arg, help="start:stop:step, list or value")
    common.add_argument("--alpha1", metavar="RANGE", type=_range_arg)
    common.add_argument("--alpha2", metavar="RANGE", type=_range_arg)
    common.add_argument("--restarts", metavar="N", type=_positive_int, help="optimizer restarts")
    common.add_argument("--omega", metavar="X", type=_number_arg, help="drive strength in units of chi")
    common.add_argument("--phi", metavar="X", type=_number_arg, help="target gate phase")

    parser = _Parser(prog="ecsbell", description="Bell tests with entangled coherent states.")
    parser.add_argument("--version", action="version", version=f"ecsbell {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    helps = {
        "correlations": "canonical-angle correlations for the ECS and the classical mixture",
        "bell-sweep": "S_RP and optimized S_BW versus alpha, with thresholds",
        "bell-grid": "S_RP on an alpha1 x alpha2 grid",
        "bw-optimize": "optimize the displaced-parity Bell signal",
        "gate-fidelity": "fidelity of the dispersive phase-gate pulse versus time",
        "verify": "run the oracle cross-check suite",
    }
    for mode in MODES:
        sub.add_parser(mode, parents=[common], help=helps[mode])
    return parser


def _overrides(args) -> dict:
    out = {"out": args.out, "jobs": args.jobs, "seed": args.seed, "dim": args.dim, "plot": args.plot,
           "theta": args.theta, "alpha1": args.alpha1, "alpha2": args.alpha2,
           "restarts": args.restarts, "omega": args.omega, "phi": args.phi}
    if args.mode == "gate-fidelity" and args.alpha is not None:
        if len(args.alpha) != 1:
            raise ConfigError("gate-fidelity takes a single alpha", field="--alpha")
        out["gate_alpha"] = args.alpha[0]
    else:
        out["alpha"] = args.alpha
    return out


def _available_cpus() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, mode=args.mode, overrides=_overrides(args))
        config.pairs() if config.mode not in ("gate-fidelity", "verify") else None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    jobs = config.jobs or _available_cpus()
    t0 = time.perf_counter()
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                record = run(config, pool)
        else:
            record = run(config)
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (ConfigError, DomainError, DegenerateStateError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EcsBellError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = write_csv(record, config.out)
    if config.out is None:
        sys.stdout.write(text)
    if config.plot:
        target = Path(config.out).with_suffix(".svg") if config.out else Path(f"{config.mode}.svg")
        try:
            written = write_plot(record, target)
        except ImportError:
            print("--plot needs matplotlib (pip install 'artifact[plot]')", file=sys.stderr)
            return EXIT_CONFIG
        if written is not None:
            print(f"plot: {written}", file=sys.stderr)

    elapsed = time.perf_counter() - t0
    for check in record.checks:
        mark = "ok  " if check.passed else "FAIL"
        print(f"{mark} {check.name}: {check.status} measured={check.measured:.3e} "
              f"tolerance={check.tolerance:.3e}", file=sys.stderr)
    print(f"{config.mode}: {len(record.rows)} rows in {elapsed:.2f} s", file=sys.stderr)
    if any(c.status == "truncation" for c in record.failures):
        return EXIT_TRUNCATION
    if record.failures:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
