"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class RquError(Exception):
    """Base class for all errors raised by this package."""


class ParameterDomainError(RquError):
    """A physical parameter or argument is outside its valid domain."""


class FluxSingularityError(ParameterDomainError):
    """Flux bias inside the margin band around an odd multiple of Phi0/2,
    where the dc-SQUID inductance diverges."""


class DegenerateDesignError(ParameterDomainError):
    """A design with zero coupling (g0*M = 0); noise referral is undefined."""


class ConfigError(RquError):
    """Invalid run configuration (simulation grids, CLI config files)."""


class UsageError(RquError):
    """API misuse, e.g. combining quantities evaluated at different frequencies."""


class UnsupportedRegimeError(RquError):
    """Requested evaluation outside the regime an operation is derived for."""


class FitDomainError(RquError):
    """Input data insufficient or degenerate for a fit."""


class ConvergenceError(RquError):
    """An iterative solve failed to converge within its budget."""


class ResourceLimitError(RquError):
    """A requested computation exceeds the configured resource cap."""


#: CLI exit codes.  0 is success; 1 is reserved for unexpected errors.
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_CONVERGENCE = 4


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented CLI exit code."""
    if isinstance(exc, UnsupportedRegimeError):
        return EXIT_REGIME
    if isinstance(exc, (ConvergenceError, ResourceLimitError)):
        return EXIT_CONVERGENCE
    if isinstance(exc, RquError):
        return EXIT_CONFIG
    return EXIT_UNEXPECTED
