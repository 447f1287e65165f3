"""Typed errors shared across the package.

Every failure mode that callers are expected to distinguish gets its own
exception class, so the CLI can map them onto stable exit codes:

  * usage and parse problems            -> UsageError            (exit 1)
  * degree cap exceeded                 -> DegreeCapExceeded     (exit 2)
  * broken internal certificates        -> InternalInvariantError (exit 3)

Anything else escaping to the CLI is a bug and also maps to exit 3.
"""

from __future__ import annotations


class PadicrootsError(Exception):
    """Base class for all package-specific errors."""


class UsageError(PadicrootsError):
    """Malformed input: bad polynomial text, bad JSON, bad flag values."""


class PrimeValidationError(UsageError):
    """A value that must be prime is not."""


class DegreeCapExceeded(PadicrootsError):
    """An operation would construct a polynomial above the degree cap."""

    def __init__(self, degree: int, cap: int, context: str = ""):
        self.degree = degree
        self.cap = cap
        self.context = context
        where = f" in {context}" if context else ""
        super().__init__(f"degree {degree} exceeds cap {cap}{where}")


class InternalInvariantError(PadicrootsError):
    """A certified internal invariant failed to hold; results untrusted."""


class PrecisionError(InternalInvariantError):
    """Interval arithmetic failed to certify a value at maximum precision."""


class HenselDepthError(InternalInvariantError):
    """Root-isolation recursion exceeded its certified depth bound."""


class CacheStaleError(PadicrootsError):
    """An on-disk cache is incompatible or corrupted; refusing to guess."""
