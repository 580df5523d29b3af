"""Exception hierarchy shared by all qpo modules."""


class QPOError(Exception):
    """Base class for every error raised by the package."""


class DomainError(QPOError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ParameterError(QPOError, ValueError):
    """Invalid model parameters (e.g. lambda >= rho)."""


class ConfigurationError(QPOError, ValueError):
    """Invalid grid or experiment configuration."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors or [])


class ConstructionInfeasible(QPOError):
    """The growth function does not admit the anchor sequences needed by the construction."""


class QuadratureError(QPOError, ArithmeticError):
    """An adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SingularityError(QPOError, ZeroDivisionError):
    """Evaluation at a pole."""
