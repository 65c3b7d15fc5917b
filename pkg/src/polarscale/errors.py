"""Exception vocabulary shared by every module.

Errors are deliberately coarse: a ``DomainError`` means the caller handed in
something outside an operation's stated domain, a ``ResourceLimitError`` means
the request is legal but too large for exact treatment, and an
``InternalCheckError`` flags a violated self-check that should be impossible
to reach from the public surface.
"""

from __future__ import annotations


class PolarScaleError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PolarScaleError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class UnsupportedCaseError(PolarScaleError, ValueError):
    """The input is well-formed but the requested case is not handled."""


class ResourceLimitError(PolarScaleError, RuntimeError):
    """The request would exceed the documented exact-computation limits."""


class InternalCheckError(PolarScaleError, RuntimeError):
    """A built-in consistency assertion failed; indicates a bug, not misuse."""


class ReportParseError(PolarScaleError, ValueError):
    """A persisted report file is malformed; message carries the line number."""
