"""Analysis configuration shared by the pipeline, service, and CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .errors import InvariantViolation
from .kinematics import INSTABILITY_MODES
from .stats import TTEST_MODES


@dataclass(frozen=True)
class AnalysisConfig:
    conf_threshold: float = 0.6
    opposition_tol_deg: float = 30.0
    phase_threshold: float = 0.5
    smooth_window: int = 15
    instability_mode: str = "literal"
    ttest_mode: str = "standard"
    coverage_min: float = 0.3
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.conf_threshold < 1.0:
            raise InvariantViolation("conf_threshold in [0, 1)")
        if not 0.0 < self.phase_threshold < 1.0:
            raise InvariantViolation("phase_threshold in (0, 1)")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise InvariantViolation("smooth_window odd and positive")
        if self.instability_mode not in INSTABILITY_MODES:
            raise InvariantViolation(f"instability_mode in {INSTABILITY_MODES}")
        if self.ttest_mode not in TTEST_MODES:
            raise InvariantViolation(f"ttest_mode in {TTEST_MODES}")
        if self.workers < 1:
            raise InvariantViolation("workers >= 1")

    @classmethod
    def from_mapping(cls, obj: dict | None) -> "AnalysisConfig":
        if not obj:
            return cls()
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InvariantViolation("known config keys", f"unknown: {sorted(unknown)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)
