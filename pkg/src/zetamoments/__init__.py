"""Critical-line zeta zeros, discrete moments over zeros, and inequality audits."""

from .zetafn import (
    CONSTANTS,
    Constants,
    DomainError,
    EvalResult,
    NearZeroError,
    PoleError,
    chi,
    digamma,
    hardy_z,
    log_deriv,
    log_gamma,
    theta,
    zeta,
    zeta_deriv,
    zeta_prime,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "Constants",
    "DomainError",
    "EvalResult",
    "NearZeroError",
    "PoleError",
    "chi",
    "digamma",
    "hardy_z",
    "log_deriv",
    "log_gamma",
    "theta",
    "zeta",
    "zeta_deriv",
    "zeta_prime",
    "__version__",
]
