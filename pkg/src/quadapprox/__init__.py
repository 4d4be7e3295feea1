"""Certified rational approximation of points on quadrics ``{f = 1}``."""

__version__ = "0.1.0"

from .arith import Certainty, RealEnclosure, certified_leq, enclose  # noqa: E402
from .errors import (  # noqa: E402
    AnisotropicFormError,
    BudgetExceeded,
    ContractViolation,
    IndeterminateComparison,
    IsotropyIndeterminate,
    QuadApproxError,
)
from .forms import IndefiniteLift, QuadraticForm, compute_constants  # noqa: E402
from .pipeline import (  # noqa: E402
    ApproximationCertificate,
    QuadricRationalPoint,
    VerifyStatus,
    approximate,
    approximate_independent,
    verify_certificate,
)
from .transforms import SurfacePoint, TransformStack  # noqa: E402
from .zeros import decide_isotropy, independent_zeros, small_zero  # noqa: E402

__all__ = [
    "AnisotropicFormError",
    "ApproximationCertificate",
    "BudgetExceeded",
    "Certainty",
    "ContractViolation",
    "IndefiniteLift",
    "IndeterminateComparison",
    "IsotropyIndeterminate",
    "QuadApproxError",
    "QuadraticForm",
    "QuadricRationalPoint",
    "RealEnclosure",
    "SurfacePoint",
    "TransformStack",
    "VerifyStatus",
    "approximate",
    "approximate_independent",
    "certified_leq",
    "compute_constants",
    "decide_isotropy",
    "enclose",
    "independent_zeros",
    "small_zero",
    "verify_certificate",
]
