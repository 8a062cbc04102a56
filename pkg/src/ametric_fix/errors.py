"""Exception types shared across the package."""

from __future__ import annotations


class AMetricError(Exception):
    """Base class for every error raised by this package."""


class UsageError(AMetricError):
    """Invalid arguments, malformed configuration, or API misuse."""


class CarrierDomainError(AMetricError):
    """A point (or a Picard iterate) fell outside the space's carrier."""

    def __init__(self, message: str, point=None, index: int | None = None):
        super().__init__(message)
        self.point = point
        self.index = index


class ConstructionError(AMetricError):
    """A gated construction failed; carries the offending witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
