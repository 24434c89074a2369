"""
Exception hierarchy.

Algorithm modules raise these; adapters and the runner translate them into
log lines and exit codes.
"""


class HomsenseError(Exception):
    """Base class for every error raised by the toolkit."""


class NonSquareMatrixError(HomsenseError, ValueError):
    """An operation that needs a square matrix received a rectangular one."""


class ShapeMismatchError(HomsenseError, ValueError):
    """Operand shapes are incompatible."""


class ZeroPolynomialError(HomsenseError, ValueError):
    """An operation that needs a nonzero polynomial received zero."""


class NotAnEigenvalueError(HomsenseError, ValueError):
    """The requested value is not an eigenvalue of the matrix."""


class HypothesisError(HomsenseError, ValueError):
    """Preconditions of a constructive lemma are not met."""


class IrrationalSpectrumError(HypothesisError):
    """The characteristic polynomial does not split over the rationals."""

    def __init__(self, message: str = "rational-spectrum required"):
        super().__init__(message)


class SamplingError(HomsenseError, RuntimeError):
    """Random sampling exhausted its attempts without a non-degenerate draw."""


class BudgetExceededError(HomsenseError, RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, cardinality: int, budget: int):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"enumeration needs {cardinality} collision systems, budget is {budget}"
        )


class InputFormatError(HomsenseError, ValueError):
    """Malformed input document; the message names the offending field."""


class BoundViolationError(HomsenseError, AssertionError):
    """An inequality that the theory guarantees was found violated."""
