"""Diagnostic records and the error type shared by every analysis stage."""

from __future__ import annotations

from dataclasses import dataclass, field

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One machine-readable finding: a stable code, a severity, and a location."""

    code: str
    severity: str
    path: str
    message: str

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "path": self.path,
            "message": self.message,
        }

    def __str__(self) -> str:
        loc = f" {self.path}" if self.path else ""
        return f"{self.severity} {self.code}{loc}: {self.message}"


class ToolError(Exception):
    """Raised when an operation cannot produce a result at all.

    Carries the same (code, path, message) triple as a Diagnostic so the CLI
    can render failures uniformly. Recoverable findings are returned as
    Diagnostic lists instead of raised.
    """

    def __init__(self, code: str, message: str, path: str = "") -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.path = path

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, ERROR, self.path, self.message)


@dataclass
class DiagnosticBag:
    """Mutable collector used while walking a document."""

    items: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, path: str, message: str) -> None:
        self.items.append(Diagnostic(code, ERROR, path, message))

    def warning(self, code: str, path: str, message: str) -> None:
        self.items.append(Diagnostic(code, WARNING, path, message))

    def extend(self, more: list[Diagnostic]) -> None:
        self.items.extend(more)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diagnostics)
