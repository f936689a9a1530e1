"""Exception taxonomy.

``NumericalGuardError`` subclasses mark runs that stopped because a numerical
safety check tripped (CLI exit code 3), as opposed to invalid usage.
"""


class HeatLabError(Exception):
    """Base class for all package errors."""


class NumericalGuardError(HeatLabError):
    """A numerical safety guard refused to continue."""


# -- grid construction / sampling -------------------------------------------

class NonPositiveExtent(HeatLabError):
    pass


class OddPointCount(HeatLabError):
    pass


class UnsupportedDimension(HeatLabError):
    pass


class NonFiniteSample(HeatLabError):
    pass


class GridMismatch(HeatLabError):
    pass


class OverflowInInverseGaussWeight(NumericalGuardError):
    pass


# -- kernels ------------------------------------------------------------------

class NonPositiveTime(HeatLabError):
    pass


class OrderTooHigh(HeatLabError):
    pass


class EvaluationPastBlowUp(HeatLabError):
    pass


# -- semigroup ----------------------------------------------------------------

class TailEscape(NumericalGuardError):
    pass


class DataNotSupportedInHalfLine(HeatLabError):
    pass


class RescaledArgumentOffGrid(NumericalGuardError):
    pass


# -- diagnostics / series -----------------------------------------------------

class TooFewPoints(HeatLabError):
    pass


class MassMismatch(HeatLabError):
    pass


class ZeroErrorEntry(HeatLabError):
    pass


class RateNotDecreasing(HeatLabError):
    pass


class NoSignChangeOnGrid(NumericalGuardError):
    pass


class NonPositiveField(HeatLabError):
    pass


class NegativeDensity(HeatLabError):
    pass


# -- cli ------------------------------------------------------------------------

class ConfigInvalid(HeatLabError):
    pass


class IoFailure(HeatLabError):
    pass
