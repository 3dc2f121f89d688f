from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Certificate:
    """Outcome of an identity check.

    ``items`` maps an item label to its residual: an exact object (form,
    vector, rational) that must vanish, or a float error for numeric checks.
    ``failures`` lists the labels whose residual did not vanish.
    """

    name: str
    passed: bool
    exact: bool = True
    items: dict[str, Any] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    preconditions: list["Certificate"] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        status = "pass" if self.passed else "fail"
        kind = "exact" if self.exact else "numeric"
        text = f"{self.name}: {status} ({kind})"
        if self.failures:
            text += " failing: " + ", ".join(self.failures[:5])
            if len(self.failures) > 5:
                text += f" (+{len(self.failures) - 5} more)"
        return text


def residual_is_zero(value) -> bool:
    """Exact zero test for the residual types used across the package."""
    if hasattr(value, "is_zero"):
        return value.is_zero()
    if isinstance(value, (list, tuple)):
        return all(residual_is_zero(v) for v in value)
    return value == 0


def exact_certificate(name: str, items: dict[str, Any], notes=None) -> Certificate:
    failures = [label for label, res in items.items() if not residual_is_zero(res)]
    return Certificate(name, not failures, True, dict(items), failures, list(notes or []))


def numeric_certificate(name: str, errors: dict[str, float], tol: float, notes=None) -> Certificate:
    failures = [label for label, err in errors.items() if not err < tol]
    cert = Certificate(name, not failures, False, dict(errors), failures, list(notes or []))
    cert.notes.append(f"tolerance {tol:g}")
    return cert
