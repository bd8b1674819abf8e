"""Check/report containers shared by every verifier and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import VerificationError


@dataclass
class Check:
    name: str
    passed: bool
    residual: str
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status, "residual": self.residual, "details": self.details}


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, residual: Any, details: dict[str, Any] | None = None) -> Check:
        chk = Check(name, bool(passed), residual if isinstance(residual, str) else _num(residual), details or {})
        self.checks.append(chk)
        return chk

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.details))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def raise_for_failure(self) -> Report:
        for c in self.checks:
            if not c.passed:
                raise VerificationError(c.name, c.residual)
        return self


def _num(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)
