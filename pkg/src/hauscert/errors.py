"""Shared exception types."""


class HauscertError(Exception):
    """Base class for all library errors."""


class OrderTooLarge(HauscertError):
    pass


class OrderMismatch(HauscertError):
    pass


class SingularColumn(HauscertError):
    pass


class SingularMatrix(HauscertError):
    pass


class NonFiniteEntries(HauscertError):
    pass


class DimensionTooLarge(HauscertError):
    pass


class NegativeValueDetected(HauscertError):
    pass


class NegativeKernel(HauscertError):
    pass


class NonPositiveScale(HauscertError):
    pass


class GridTooCoarse(HauscertError):
    pass


class PreconditionUnmet(HauscertError):
    pass


class SingularConstantPart(HauscertError):
    pass


class NonPositivePoint(HauscertError):
    pass


class DivergentTail(HauscertError):
    pass


class ConfigError(HauscertError):
    pass
