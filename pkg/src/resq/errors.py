"""Exception and warning types shared across the library."""


class ResqError(Exception):
    """Base class for all library errors."""


class DomainError(ResqError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConfigError(DomainError):
    """A model configuration violates a structural invariant."""


class PreconditionError(ResqError, ValueError):
    """A documented operation precondition does not hold."""


class DegeneracyError(ResqError, RuntimeError):
    """Resonance eigenvalues collide; perturbation data is ill-defined.

    Carries the indices of the colliding branches in ``branches``.
    """

    def __init__(self, message, branches=()):
        super().__init__(message)
        self.branches = tuple(branches)


class NumericError(ResqError, ArithmeticError):
    """A numerical consistency check failed beyond tolerance."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge; ``residual`` holds the estimate."""

    def __init__(self, message, value=None, residual=None):
        super().__init__(message)
        self.value = value
        self.residual = residual


class WeakCouplingWarning(UserWarning):
    """Coupling is strong enough that dropped higher-order terms may matter."""
