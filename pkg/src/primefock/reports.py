"""Verification report container used by every check in the package."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one numerical check: a residual against a tolerance.

    ``passed`` is always ``residual <= tolerance``; it is stored rather than
    recomputed so serialized reports stay self-consistent.
    """

    name: str
    residual: float
    tolerance: float
    passed: bool
    params: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name, residual, tolerance, params=None, diagnostics=None):
        return cls(
            name=name,
            residual=float(residual),
            tolerance=float(tolerance),
            passed=bool(residual <= tolerance),
            params=dict(params or {}),
            diagnostics=dict(diagnostics or {}),
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "params": self.params,
            "diagnostics": self.diagnostics,
        }
