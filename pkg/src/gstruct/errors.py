"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class GStructError(Exception):
    """Base class for all errors raised by gstruct."""


class SchemaError(GStructError):
    """A document does not follow the expected structure."""


class ValidationError(GStructError):
    """Input is well formed but mathematically invalid.

    ``witness`` carries a small JSON-friendly description of the failure.
    """

    def __init__(self, message: str, witness=None) -> None:
        super().__init__(message)
        self.witness = witness


class NonTransitiveError(ValidationError):
    """Some nonnegative element acts trivially on the negative part."""


class BracketInconsistencyError(ValidationError):
    """The bracket recursion produced a map outside the computed space."""


class TruncationError(GStructError):
    """A computation needs degrees beyond the available truncation order."""


class SingularFrameError(ValidationError):
    """A frame is degenerate at the origin."""
