"""Exception hierarchy shared by all modules."""


class QuadApproxError(Exception):
    """Base class; ``exit_code`` is what the command line maps it to."""

    exit_code = 1


class FormError(QuadApproxError, ValueError):
    exit_code = 64


class DimensionError(QuadApproxError, ValueError):
    exit_code = 64


class SurfaceResidualError(QuadApproxError, ValueError):
    exit_code = 64


class AnisotropicFormError(QuadApproxError):
    """The indefinite lift has no nonzero integer zero."""


class IsotropyIndeterminate(QuadApproxError):
    def __init__(self, message: str, bound: int | None = None):
        super().__init__(message)
        self.bound = bound


class BudgetExceeded(QuadApproxError):
    pass


class IndeterminateComparison(QuadApproxError):
    """A certified comparison stayed undecided up to the precision cap."""


class NoQuadricPoint(QuadApproxError):
    """No rational point on the quadric has an admissible denominator."""


class ContractViolation(QuadApproxError):
    exit_code = 70


class InputError(QuadApproxError, ValueError):
    """Malformed or out-of-range user input."""

    exit_code = 64
