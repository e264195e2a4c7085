"""Run records shared by the sweep runners and the CSV writer."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    dim: int = 0
    # "pass", "fail" or "truncation"
    status: str = ""
    detail: str = ""

    def __post_init__(self):
        if not self.status:
            object.__setattr__(self, "status", "pass" if self.passed else "fail")


@dataclass
class RunRecord:
    """Output of one CLI run.

    ``rows`` are in deterministic grid order; ``footer`` holds derived
    summaries (thresholds, final values). ``timings`` holds wall-clock per
    point and is never written to the CSV, so that reruns are byte-identical.
    """

    mode: str
    config: dict
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    footer: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    timings: list[float] = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures
