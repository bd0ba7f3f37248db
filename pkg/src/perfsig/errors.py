"""Exception taxonomy shared by all perfsig modules.

Every domain error subclasses :class:`PerfsigError` so callers can catch one
type at an API boundary; the CLI maps input/config errors to exit code 2 and
the remaining domain errors to exit code 3.
"""


class PerfsigError(Exception):
    """Base class for all perfsig domain errors."""


class EmptyInput(PerfsigError):
    """An operation that requires at least one element received none."""


class MisalignedWindows(PerfsigError):
    """Series that must share a day range (start and length) do not."""


class DegenerateSeries(PerfsigError):
    """A series has zero variance where variation is required."""


class TooShort(PerfsigError):
    """A series is shorter than the operation's minimum length."""


class LengthMismatch(PerfsigError):
    """Two series that must have equal length do not."""


class ZeroVector(PerfsigError):
    """A vector with zero magnitude where a direction is required."""


class CoverageGap(PerfsigError):
    """A signature does not cover the requested day range."""


class OutOfRange(PerfsigError):
    """A day range falls outside the covered span."""


class InvalidParams(PerfsigError):
    """Parameter values violate their declared constraints."""


class DegenerateWindow(PerfsigError):
    """The existing signature is constant over the tested window."""


class ActionOnNegativeVerdict(PerfsigError):
    """A splice was requested for a verdict that found no change."""


class NonMonotoneTime(PerfsigError):
    """An outcome was recorded for a day earlier than one already seen."""


class ParseError(PerfsigError):
    """An input file could not be parsed."""


class InsufficientData(PerfsigError):
    """An input file holds fewer samples than required."""


class ConfigError(PerfsigError):
    """A configuration key or value is not usable."""
