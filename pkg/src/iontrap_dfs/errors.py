"""Exception types raised across the package."""


class DFSError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(DFSError, ValueError):
    pass


class NotHermitian(DFSError, ValueError):
    pass


class NotPSD(DFSError, ValueError):
    pass


class IndexOutOfRange(DFSError, IndexError):
    pass


class SameQubit(DFSError, ValueError):
    pass


class ZeroDetuning(DFSError, ZeroDivisionError):
    pass


class UnknownCode(DFSError, KeyError):
    pass


class NumericalFailure(DFSError, ArithmeticError):
    """Integrator left its accuracy envelope (trace drift, lost positivity)."""


class StepTooLarge(NumericalFailure):
    pass


class InsufficientPoints(DFSError, ValueError):
    pass


class NonPositiveValue(DFSError, ValueError):
    pass


class EmptyGenerators(DFSError, ValueError):
    pass


class CodeDimensionUnsupported(DFSError, ValueError):
    pass


class ClosureDidNotConverge(NumericalFailure):
    pass


class InvalidConfig(DFSError, ValueError):
    pass


class PositivityLost(NumericalFailure):
    pass
