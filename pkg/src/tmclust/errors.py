"""Shared exception types."""

from __future__ import annotations


class TmclustError(Exception):
    """Base class for all data and validation errors raised by this package."""


class ValidationError(TmclustError):
    """Input violates a documented invariant."""


class XtmParseError(TmclustError):
    """XTM input is not well-formed XML."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset
