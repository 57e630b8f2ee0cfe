"""Exception hierarchy shared across the package."""


class ConformalError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ConformalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ConformalError, ValueError):
    """A specification object is internally inconsistent or unsupported."""


class TieError(ConformalError):
    """Exact ties between calibration and test scores.

    Continuous score distributions make ties almost surely impossible, so a
    tie indicates an input that violates the continuity assumption; silently
    breaking ties would change the p-value law.
    """


class DegenerateWeightsError(ConformalError):
    """All effective weights vanish, leaving p-values undefined."""


class AssumptionViolationError(ConformalError):
    """A limit-theory assumption fails (e.g. unbounded weight function)."""


class SubcriticalAlphaError(AssumptionViolationError):
    """The BH level lies at or below the critical value; the asymptotic
    threshold does not exist and the procedure has no asymptotic power."""
