"""Pass/fail bookkeeping shared by the gauge checker, the samplers and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# Tolerance policy: identities that are exact algebra get the tight bound,
# identities that flow through a numeric gauge inversion get the loose one.
# Violations are always scaled by max(1, magnitudes) before comparison.
TOL_ALGEBRA = 1e-12
TOL_GAUGE = 1e-9


def violation_scale(*values: float) -> float:
    """Normalization for mixed absolute/relative comparisons."""
    return max(1.0, *(abs(v) for v in values)) if values else 1.0


@dataclass
class PropertyCheck:
    """One verified property: its worst observed violation and a witness."""

    name: str
    passed: bool
    worst_violation: float
    tolerance: float
    witness: object = None  # JSON-friendly: numbers, strings, lists, dicts, None
    details: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    title: str
    checks: list[PropertyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: PropertyCheck) -> None:
        self.checks.append(check)

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def first_failure(self) -> PropertyCheck | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [self.title]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"  {status}  {c.name}: worst={c.worst_violation!r} tol={c.tolerance!r}"
            )
        lines.append(("all checks passed" if self.passed else "CHECKS FAILED"))
        return "\n".join(lines) + "\n"
