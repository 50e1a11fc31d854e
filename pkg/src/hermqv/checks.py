"""
Exceptions raised by the toolkit, and the small validators that raise them.

Configuration mistakes (wrong coupling for a dependence mode, unknown statistic,
too few replications) go through allennlp's ``ConfigurationError``; everything
here is about numbers that are outside their mathematical range or numerical
procedures that did not behave.
"""
import math
import numbers

from allennlp.common.checks import ConfigurationError


class DomainError(ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class UnsupportedScheduleError(ValueError):
    """The interspacing schedule is not a power law, so regimes are undecidable."""


class GridMismatchError(ValueError):
    """Path times are not an arithmetic progression starting at 0, or two grids differ."""


class DecompositionError(ArithmeticError):
    """V = V1 + V2 + 2 V3 failed beyond the accumulated floating tolerance."""


class DegenerateSampleError(RuntimeError):
    """A Monte Carlo statistic has zero spread at some N."""


class QuadratureConvergenceError(RuntimeError):
    """Refinement did not stabilise an integral to the requested relative tolerance."""


class GeneratorDiagnosticError(RuntimeError):
    """Base class for sampler and path generator diagnostics."""


class EmbeddingError(GeneratorDiagnosticError):
    def __init__(self, message: str, most_negative: float) -> None:
        super().__init__(message)
        self.most_negative = most_negative


class GridTooCoarseError(GeneratorDiagnosticError):
    pass


class CalibrationError(GeneratorDiagnosticError):
    pass


class IllConditionedBasisError(ValueError):
    """Two base functions are numerically collinear."""


def check_hurst(H: float, name: str = "H") -> None:
    if not (isinstance(H, numbers.Real) and math.isfinite(H) and 0.5 < H < 1.0):
        raise DomainError(f"{name} must lie in the open interval (1/2, 1), got {H}")


def check_order(q: int, name: str = "q") -> None:
    if isinstance(q, bool) or not isinstance(q, numbers.Integral) or q < 1:
        raise DomainError(f"{name} must be an integer >= 1, got {q}")


def check_positive(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value}")


__all__ = [
    "ConfigurationError",
    "DomainError",
    "UnsupportedScheduleError",
    "GridMismatchError",
    "DecompositionError",
    "DegenerateSampleError",
    "QuadratureConvergenceError",
    "GeneratorDiagnosticError",
    "EmbeddingError",
    "GridTooCoarseError",
    "CalibrationError",
    "IllConditionedBasisError",
    "check_hurst",
    "check_order",
    "check_positive",
]
