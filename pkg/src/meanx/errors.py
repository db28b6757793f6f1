"""Exception taxonomy shared across the package.

Every error raised by the library derives from :class:`MeanxError`, so callers
can catch the whole family with one clause while the CLI maps subclasses to
exit codes.
"""

from __future__ import annotations


class MeanxError(Exception):
    """Base class for all package errors."""


class DomainError(MeanxError, ValueError):
    """An input lies outside the interval a mean or generator is defined on."""


class ArityError(MeanxError, ValueError):
    """A vector length is incompatible with a mean's declared arity."""


class NumericalError(MeanxError, ArithmeticError):
    """Overflow or NaN produced while evaluating in generator space."""


class FlagError(MeanxError, ValueError):
    """A descriptor flag required by the requested operation is not declared."""


class ParseError(MeanxError, ValueError):
    """A descriptor string does not conform to the mini-language grammar."""


class NotIrreducible(MeanxError, ValueError):
    """Period was requested for a digraph that is not strongly connected."""


class NotErgodic(MeanxError, ValueError):
    """The index family's incidence graph does not guarantee a unique invariant mean."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotConverged(MeanxError, RuntimeError):
    """The fixed-point iteration hit max_iter with the gap above tolerance.

    Attributes:
        bracket: (min, max) of the last iterate; the limit is certified to lie
            inside it, so callers may still use the interval.
        level: arity of the extension level that failed, when applicable.
        result: partial ExtensionResult with converged=False, when available.
    """

    def __init__(self, message: str, bracket=None, level=None, result=None):
        super().__init__(message)
        self.bracket = bracket
        self.level = level
        self.result = result


class ResourceLimit(MeanxError, RuntimeError):
    """An evaluation exceeded the bivariate-call budget or the arity cap."""
