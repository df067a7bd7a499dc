"""Shared error types and the check report used by validators and batteries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class VLiftError(ValueError):
    """Base class for input errors raised by the library."""


class SizeGuardError(VLiftError):
    """An enumeration would exceed the configured object cap."""


class ShapeError(VLiftError):
    """Matrix shape, quantale or endpoint mismatch."""


#: default cap on enumerated objects (presheaf and power categories)
DEFAULT_MAX_OBJECTS = 4096

# validators stop recording after this many failures per report
_FAILURE_CAP = 50


@dataclass
class Report:
    """Outcome of a check.

    ``failures`` holds dicts with at least a ``"check"`` key plus a witness.
    ``skipped`` records checks that were not attempted and why.
    """

    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    def count(self, n: int = 1) -> None:
        self.checked += n

    def fail(self, check: str, **witness: Any) -> None:
        if len(self.failures) >= _FAILURE_CAP:
            self.truncated = True
            return
        self.failures.append({"check": check, **witness})

    def skip(self, check: str, reason: str) -> None:
        self.skipped.append({"check": check, "reason": reason})

    def merge(self, other: "Report", prefix: str = "") -> None:
        self.checked += other.checked
        for f in other.failures:
            g = dict(f)
            if prefix:
                g["check"] = f"{prefix}{g['check']}"
            if len(self.failures) < _FAILURE_CAP:
                self.failures.append(g)
            else:
                self.truncated = True
        self.skipped.extend(other.skipped)
        self.truncated = self.truncated or other.truncated

    def first(self):
        return self.failures[0] if self.failures else None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "failures": self.failures,
            "skipped": self.skipped,
            "truncated": self.truncated,
            "info": self.info,
        }

    def __bool__(self):  # pragma: no cover - guard against accidental truthiness
        raise TypeError("use Report.ok")
