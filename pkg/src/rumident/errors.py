"""Exception hierarchy.

``DomainError`` subclasses signal a well-formed request whose answer is a
negative domain fact (not equivalent, infeasible, outside the support).  The
CLI maps them to exit status 2; everything else that is a ``ValueError`` is a
usage problem.
"""


class RumidentError(Exception):
    """Base class for all library errors."""


class UniverseCapError(RumidentError, ValueError):
    """The universe is larger than the configured cap."""


class DomainError(RumidentError, ValueError):
    """A valid request with a negative domain answer."""


class SegmentError(DomainError):
    """Segments cannot be combined into a linear order."""


class NotSeparableError(DomainError):
    """Two orders are not a separable pair at the requested level."""


class SupportError(DomainError):
    """A distribution puts mass outside the allowed support."""


class NotEquivalentError(DomainError):
    """Two measures induce different choice probabilities."""


class SwapFeasibilityError(DomainError):
    """Applying a swap step would leave the probability simplex."""

    def __init__(self, step_index: int, message: str):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class ChoiceRuleError(DomainError):
    """A table violates the random choice rule invariants."""

    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


class ParameterDomainError(DomainError):
    """A parameter point (or a differencing neighbour) lies outside the model domain."""


class ConsistencyError(RumidentError, AssertionError):
    """Two independent computations of the same quantity disagree.

    This is never expected; it indicates a bug.
    """
