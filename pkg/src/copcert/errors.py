"""Shared exception types."""


class CopcertError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(CopcertError, ValueError):
    """Operands live on spaces of different dimension."""


class SingularMatrixError(CopcertError, ValueError):
    """A matrix symbol is singular or numerically too close to singular."""


class WeightClassError(CopcertError, ValueError):
    """A coefficient sequence fails the admissible-weight conditions."""


class MembershipError(CopcertError, ValueError):
    """A function is not square integrable against the requested measure."""


class ZeroDensityError(CopcertError, ValueError):
    """The measure density vanishes at the evaluation point."""


class QuadratureError(CopcertError, RuntimeError):
    """Numerical integration could not reach the requested tolerance."""


class ConfigError(CopcertError, ValueError):
    """A run configuration failed validation."""
