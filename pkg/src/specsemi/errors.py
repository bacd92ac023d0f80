"""Exception hierarchy.

Input problems (``StructureError`` and subclasses) map to CLI exit code 2;
a structure that parses but fails its validator raises ``ValidationError``,
which carries the failing report and maps to exit code 1.
"""
from __future__ import annotations


class StructureError(ValueError):
    """Malformed input: wrong shape, wrong arity, bad schema."""

    def __init__(self, reason: str, path: str = "$"):
        super().__init__(f"{path}: {reason}")
        self.reason = reason
        self.path = path


class UnknownElementError(StructureError):
    pass


class SizeCapError(ValueError):
    """Input exceeds a configured size cap."""


class ValidationError(ValueError):
    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class LiftError(ValueError):
    """Preconditions of a universal lift are not met."""
