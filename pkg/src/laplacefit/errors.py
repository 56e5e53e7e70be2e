"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI and by
the Monte Carlo harness when accounting for failed replicates.  Errors split
into two groups: input problems (bad files, malformed specs, invalid configs)
and statistical regime problems (the data or the fitted model leave the domain
in which the estimators are defined).
"""

from __future__ import annotations


class LaplaceFitError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


# ---------------------------------------------------------------------------
# input errors (CLI exit code 1)


class SampleValidationError(LaplaceFitError, ValueError):
    """A data value is NaN, negative or infinite; message is row-indexed."""

    code = "invalid_sample"


class SpecFormatError(LaplaceFitError, ValueError):
    """A distribution spec string could not be parsed or validated."""

    code = "spec_format"


class ConfigError(LaplaceFitError, ValueError):
    """An experiment configuration is invalid; message carries the field path."""

    code = "config"


# ---------------------------------------------------------------------------
# statistical / regime errors (CLI exit code 2)


class AllZeroSampleError(LaplaceFitError):
    """Every observation is exactly zero, so the empirical transform has no root."""

    code = "all_zero_sample"


class RegimeError(LaplaceFitError):
    """The zero fraction (or the parameter point) is outside the supported regime.

    Raised when the observed zero fraction is >= 1/e, where the asymptotic
    covariance of the estimators is not available, or when a Tweedie parameter
    point has P(X=0) >= 1/e so no censoring point with transform level 1/e
    exists.
    """

    code = "regime"


class DegenerateSampleError(LaplaceFitError):
    """All observations are equal; covariance estimation is impossible."""

    code = "degenerate_sample"


class DegenerateMomentsError(LaplaceFitError):
    """A censored moment needed as a denominator is zero."""

    code = "degenerate_moments"


class InsufficientSampleError(LaplaceFitError):
    """Fewer observations than the family-specific minimum."""

    code = "insufficient_sample"


class NearSingularError(LaplaceFitError):
    """A moment aggregate sits too close to a pole of the estimator map."""

    code = "near_singular"


class ComplexPowerError(LaplaceFitError):
    """The fitted power base is negative with a non-integer exponent.

    The population base is theta/(theta + a) in [0, 1), so a negative base
    means the fitted model is far outside the Tweedie family; the statistic is
    reported as undefined rather than evaluated with complex powers.
    """

    code = "complex_power"


class LogDomainError(LaplaceFitError):
    """The censoring point equals 1 within tolerance, so log(A) vanishes."""

    code = "log_domain"


class TiltedRejectionInfeasibleError(LaplaceFitError):
    """Tilted-stable rejection sampling would need more than ~1e6 proposals per draw."""

    code = "tilted_rejection_infeasible"


class InvalidRegimeError(LaplaceFitError):
    """A mean/zero-probability triple maps outside the compound-Poisson range."""

    code = "invalid_regime"


class UnsupportedOperationError(LaplaceFitError):
    """The requested closed form or sampler does not exist for this family."""

    code = "unsupported_operation"


#: errors that signal a statistical regime problem rather than bad input
STATISTICAL_ERRORS = (
    AllZeroSampleError,
    RegimeError,
    DegenerateSampleError,
    DegenerateMomentsError,
    InsufficientSampleError,
    NearSingularError,
    ComplexPowerError,
    LogDomainError,
    TiltedRejectionInfeasibleError,
    InvalidRegimeError,
    UnsupportedOperationError,
)
