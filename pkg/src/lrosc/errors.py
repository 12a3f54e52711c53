"""Exception hierarchy shared by all modules."""


class LROscError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LROscError, ValueError):
    """A schedule was evaluated outside its declared time domain."""


class PositivityError(LROscError, ValueError):
    """A mass (or an implied inverse mass) is not strictly positive."""


class RegimeError(LROscError, ArithmeticError):
    """The invariant is not positive definite: its frequencies are not real.

    ``details`` carries the offending discriminant values.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class InstabilityError(RegimeError):
    """The Hamiltonian is in the unstable regime (second tilde frequency imaginary)."""


class DegenerateError(LROscError, ArithmeticError):
    """A closed-form construction vanished or a required matrix is singular."""


class ConditioningError(LROscError, ArithmeticError):
    """The symplectic transformation is too ill conditioned to be trusted."""


class NormalizationError(LROscError, ArithmeticError):
    """A Gaussian state is not normalizable or a phase rate is not real."""


class IntegrationError(LROscError, RuntimeError):
    """The adaptive integrator failed (step-size underflow, blow-up, ...)."""


class TruncationError(LROscError, RuntimeError):
    """A truncated Fock-space computation leaked into the cutoff boundary."""


class ConfigError(LROscError, ValueError):
    """A run configuration could not be parsed or validated."""
