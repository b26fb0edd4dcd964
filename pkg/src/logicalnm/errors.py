"""Exception hierarchy shared by all modules."""


class LogicalNMError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(LogicalNMError, ValueError):
    pass


class CapacityError(LogicalNMError):
    """Requested object exceeds the dense-simulation size limit."""


class PauliParseError(LogicalNMError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CodeValidationError(LogicalNMError, ValueError):
    """A stabilizer-code definition violates one of its invariants."""


class DomainError(LogicalNMError, ValueError):
    """An operation's precondition on its input does not hold."""


class SearchExhaustedError(LogicalNMError):
    pass


class HypothesisError(LogicalNMError, ValueError):
    """Inputs do not satisfy the hypotheses of the check being run."""
