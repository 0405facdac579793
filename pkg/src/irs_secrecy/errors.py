class InvalidArgument(ValueError):
    """Input violates a documented precondition."""


class NumericalFailure(ArithmeticError):
    """An iterative routine did not converge or an input is numerically singular.

    Parameters
    ----------
    message : str
    residual : float, optional
        Last residual observed before giving up, when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidConfig(InvalidArgument):
    """Configuration file is malformed or contains unknown keys."""
