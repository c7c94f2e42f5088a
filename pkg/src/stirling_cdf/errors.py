"""Exception types raised by the evaluation and inversion engines."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class CapExceededError(ValueError):
    """A size limit (recursion cap, brute-force limit) was exceeded."""


class ConvergenceError(ArithmeticError):
    """An iterative solver did not reach its tolerance within the iteration cap."""
