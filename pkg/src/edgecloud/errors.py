"""Exception types raised by the planner."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class InfeasibleError(ValueError):
    """Raised when the requested split cannot fit the available link capacity."""
