"""Exception hierarchy for irs-skg.

Each error mixes in the builtin it specialises, so callers may catch either
the package error or the plain ``ValueError``/``RuntimeError``.
"""


class IrsSkgError(Exception):
    """Base class for all irs-skg errors."""

    code = "irs_skg_error"


class DimensionError(IrsSkgError, ValueError):
    """Matrix shapes do not conform."""

    code = "dimension_mismatch"


class RankDeficientError(IrsSkgError, ValueError):
    """A matrix that must have full row rank does not."""

    code = "rank_deficient"


class DegenerateInputError(IrsSkgError, ValueError):
    """Input carries no usable spread (constant sequence, zero reference, empty key)."""

    code = "degenerate_input"


class ConfigError(IrsSkgError, ValueError):
    """Invalid experiment configuration."""

    code = "invalid_config"


class NumericalError(IrsSkgError, ArithmeticError):
    """A closed-form evaluation left its valid domain."""

    code = "numerical_error"


class SvdConvergenceError(IrsSkgError, RuntimeError):
    """Every LAPACK SVD driver failed to converge."""

    code = "svd_no_convergence"

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class QuadratureError(IrsSkgError, RuntimeError):
    """Grid refinement hit its cap before reaching the requested tolerance."""

    code = "quadrature_no_convergence"

    def __init__(self, message: str, achieved_tolerance: float):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance
