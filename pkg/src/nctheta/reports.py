"""Pass/fail records returned by the property checks."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    check: str
    max_error: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "max_error": self.max_error, "tol": self.tol,
                "passed": self.passed, **self.details}
