"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BoussinesqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BoussinesqError, ValueError):
    """Argument outside the domain of a formula (k = 0, zeta outside the sector, ...)."""


class PoleError(BoussinesqError, ValueError):
    """Evaluation at (or numerically at) a pole."""


class BranchCutError(BoussinesqError, ValueError):
    """Point lies on the declared cut of a logarithm branch."""


class NearSingularError(BoussinesqError, ArithmeticError):
    """Vandermonde matrix P(k) is numerically singular (k close to the sixth roots of unity)."""


class ConvergenceError(BoussinesqError, ArithmeticError):
    """Volterra march residual above tolerance or non-finite."""


class DivisionNearZero(BoussinesqError, ArithmeticError):
    """Denominator of a reflection coefficient is below tolerance."""


class RegionMismatch(BoussinesqError, ValueError):
    """Point is not on the contour piece it was labelled with."""


class RegularizationError(BoussinesqError, ArithmeticError):
    """Epsilon-schedule extrapolation of a regularized integral did not stabilize."""


class NearContourError(BoussinesqError, ValueError):
    """Direct Cauchy integral requested too close to its own arc."""


class SignConditionError(BoussinesqError, ArithmeticError):
    """Branch resolution could not meet a positivity condition."""


class AdmissibilityError(BoussinesqError, ValueError):
    """Spectral data or model parameters violate an admissibility condition."""


class GammaArgError(BoussinesqError, ArithmeticError):
    """arg Gamma(i nu) requested at nu = 0."""


class AccuracyError(BoussinesqError, ArithmeticError):
    """Two representations of a special function disagree at their cross-over."""


class DegenerateBeta(BoussinesqError, ArithmeticError):
    """Model problem beta coefficient vanishes."""


class ConfigError(BoussinesqError, ValueError):
    """Invalid run configuration."""


class InitialDataError(BoussinesqError, ValueError):
    """Malformed or inadmissible initial data."""
