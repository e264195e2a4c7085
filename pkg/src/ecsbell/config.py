"""Sweep configuration: INI file plus command-line overrides.

A config file has sections ``[run]``, ``[state]``, ``[angles]``,
``[truncation]``, ``[optimizer]``, ``[gate]`` and ``[verify]``. Ranges are
written ``start:stop:step`` (stop inclusive), a comma list, or a single number.
Unknown keys are rejected so that typos do not silently fall back to defaults.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from ecsbell.bw import DEFAULT_RESTARTS, DEFAULT_SEED, MAX_ITER
from ecsbell.errors import ConfigError
from ecsbell.gate import DEFAULT_POINTS

MODES = ("correlations", "bell-sweep", "bell-grid", "bw-optimize", "gate-fidelity", "verify")
MAX_GRID_POINTS = 1_000_000


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    alpha: tuple[float, ...] | None = None
    alpha1: tuple[float, ...] | None = None
    alpha2: tuple[float, ...] | None = None
    theta: float = 0.0
    # phi1, phi2, phi1', phi2'; None means the canonical theta-adapted set
    angles: tuple[float, float, float, float] | None = None
    dim: int | None = None
    restarts: int = DEFAULT_RESTARTS
    seed: int = DEFAULT_SEED
    max_iter: int = MAX_ITER
    real_only: bool = False
    optimize: bool = True
    chi: float = 1.0
    omega: float = 0.2
    phi: float = math.pi / 4
    gate_alpha: float = 2.0
    points: int = DEFAULT_POINTS
    method: str = "rk4"
    verify_points: int = 200
    out: str | None = None
    plot: bool = False
    jobs: int | None = None
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}",
                              field="run.mode")
        for name in ("alpha", "alpha1", "alpha2"):
            values = getattr(self, name)
            if values is not None and len(values) == 0:
                raise ConfigError("range is empty", field=f"state.{name}")
        if self.dim is not None and self.dim < 1:
            raise ConfigError("dim must be a positive integer", field="truncation.dim")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1", field="optimizer.restarts")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1", field="optimizer.max_iter")
        if self.points < 2:
            raise ConfigError("points must be >= 2", field="gate.points")
        if self.method not in ("rk4", "static"):
            raise ConfigError("method must be 'rk4' or 'static'", field="gate.method")
        if self.verify_points < 1:
            raise ConfigError("points must be >= 1", field="verify.points")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be >= 1", field="jobs")

    def pairs(self) -> list[tuple[float, float]]:
        """(alpha1, alpha2) points in grid order for the selected mode."""
        if self.mode == "bell-grid":
            a1 = self.alpha1 or self.alpha
            a2 = self.alpha2 or self.alpha
            if a1 is None or a2 is None:
                raise ConfigError("bell-grid needs alpha1 and alpha2 (or alpha)", field="state.alpha1")
            return [(x, y) for x in a1 for y in a2]
        if self.alpha1 is not None or self.alpha2 is not None:
            a1 = self.alpha1 or self.alpha
            a2 = self.alpha2 or self.alpha
            if a1 is None or a2 is None:
                raise ConfigError("give both alpha1 and alpha2, or alpha", field="state.alpha2")
            if len(a2) == 1:
                a2 = a2 * len(a1)
            elif len(a1) == 1:
                a1 = a1 * len(a2)
            if len(a1) != len(a2):
                raise ConfigError(f"alpha1 has {len(a1)} points but alpha2 has {len(a2)}",
                                  field="state.alpha2")
            return list(zip(a1, a2))
        if self.alpha is None:
            raise ConfigError("no alpha range configured", field="state.alpha")
        return [(a, a) for a in self.alpha]

    def echo(self) -> dict:
        """Flat key/value view of every setting that affects the output, in a stable order."""
        out = {}
        for key, value in asdict(self).items():
            if key in ("source", "jobs", "out"):
                continue
            out[key] = _format_value(value)
        return out


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return str(value)


_PI = re.compile(r"^\s*(?:(?P<coef>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*?\s*)?"
                 r"(?P<sign>-)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$")


def parse_number(text: str) -> float:
    """Float literal, optionally a multiple of ``pi`` like ``pi/4``, ``-pi/2`` or ``0.5*pi``."""
    text = text.strip()
    m = _PI.match(text)
    if m:
        coef = float(m.group("coef")) if m.group("coef") else 1.0
        if m.group("sign"):
            coef = -coef
        den = float(m.group("den")) if m.group("den") else 1.0
        return coef * math.pi / den
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r}")
    return value


def parse_range(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (stop inclusive), ``a,b,c`` or a single number."""
    text = text.strip()
    if not text:
        raise ValueError("empty range")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} must be start:stop:step")
        start, stop, step = (parse_number(p) for p in parts)
        if not step > 0:
            raise ValueError(f"step must be > 0 in {text!r}")
        if stop < start:
            raise ValueError(f"stop < start in {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        if n > MAX_GRID_POINTS:
            raise ValueError(f"range {text!r} has {n} points (limit {MAX_GRID_POINTS})")
        # rounding keeps grid points like 0.07 free of accumulated float noise
        return tuple(round(start + k * step, 12) for k in range(n))
    return tuple(parse_number(p) for p in text.split(",") if p.strip())


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_optional_int(text: str):
    return None if text.strip().lower() in ("", "none", "auto") else int(text.strip())


def _parse_angles(text: str):
    if text.strip().lower() in ("", "none", "canonical"):
        return None
    vals = tuple(parse_number(p) for p in text.split(","))
    if len(vals) != 4:
        raise ValueError("angles need four values phi1,phi2,phi1p,phi2p")
    return vals


# section -> key -> (SweepConfig field, parser)
SCHEMA = {
    "run": {"mode": ("mode", str.strip), "out": ("out", str.strip), "plot": ("plot", _parse_bool)},
    "state": {"alpha": ("alpha", parse_range), "alpha1": ("alpha1", parse_range),
              "alpha2": ("alpha2", parse_range), "theta": ("theta", parse_number)},
    "angles": {"angles": ("angles", _parse_angles)},
    "truncation": {"dim": ("dim", _parse_optional_int)},
    "optimizer": {"restarts": ("restarts", _parse_int), "seed": ("seed", _parse_int),
                  "max_iter": ("max_iter", _parse_int), "real_only": ("real_only", _parse_bool),
                  "enabled": ("optimize", _parse_bool)},
    "gate": {"chi": ("chi", parse_number), "omega": ("omega", parse_number), "phi": ("phi", parse_number),
             "alpha": ("gate_alpha", parse_number), "points": ("points", _parse_int),
             "method": ("method", str.strip)},
    "verify": {"points": ("verify_points", _parse_int)},
}


def _key_lines(lines):
    """Map (section, key) to its 1-based line number."""
    where, section = {}, None
    for i, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            continue
        key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
        where.setdefault((section, key), i)
    return where


def parse_config_text(text: str, path: str | None = None, mode: str | None = None) -> dict:
    """Parse INI text into SweepConfig keyword arguments."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r}", field=f"{exc.section}.{exc.option}",
                          line=exc.lineno, path=path) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section {exc.section!r}", line=exc.lineno, path=path) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside any [section]", line=exc.lineno, path=path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line=lineno, path=path) from None
    lines = _key_lines(text.splitlines())
    values = {}
    for section in parser.sections():
        sec = section.lower()
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", path=path,
                              line=_section_line(text, section))
        for key, raw in parser.items(section):
            line = lines.get((sec, key))
            if key not in SCHEMA[sec]:
                raise ConfigError("unknown key", field=f"{sec}.{key}", line=line, path=path)
            name, conv = SCHEMA[sec][key]
            try:
                values[name] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(str(exc), field=f"{sec}.{key}", line=line, path=path) from None
    if mode is not None:
        if "mode" in values and values["mode"] != mode:
            raise ConfigError(f"config is for mode {values['mode']!r}, not {mode!r}",
                              field="run.mode", line=lines.get(("run", "mode")), path=path)
        values["mode"] = mode
    return values


def _section_line(text, section):
    for i, raw in enumerate(text.splitlines(), 1):
        if raw.strip() == f"[{section}]":
            return i
    return None


def load_config(path=None, mode: str | None = None, overrides: dict | None = None) -> SweepConfig:
    """Read ``path`` (optional), apply ``overrides`` (flags win) and validate."""
    values = {}
    source = None
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", path=str(p)) from None
        values = parse_config_text(text, str(p), mode)
        source = str(p)
    elif mode is not None:
        values["mode"] = mode
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    if "mode" not in values:
        raise ConfigError("no mode given", field="run.mode", path=source)
    try:
        return SweepConfig(source=source, **values)
    except ConfigError as exc:
        if source and exc.path is None:
            raise ConfigError(exc.message, field=exc.field, path=source) from None
        raise


def with_overrides(config: SweepConfig, **kwargs) -> SweepConfig:
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})
