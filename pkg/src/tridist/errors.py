"""Exception types raised by tridist."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain an operation accepts."""


class NumericalFailureError(ArithmeticError):
    """A numerical routine failed to reach its requested accuracy.

    ``estimate`` holds the best value obtained before giving up, if any.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
