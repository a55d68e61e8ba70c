"""Exception hierarchy.

Two families: physics-domain violations (bad parameters for the model) and
numerical failures (a computation could not meet its tolerance). The CLI maps
them to exit codes 3 and 4.
"""


class PFError(Exception):
    """Base class for all package errors."""


class PhysicsDomainError(PFError, ValueError):
    """Parameters fall outside the region where the model is defined."""


class InvalidRegime(PhysicsDomainError):
    """Energy ordering incompatible with tunneling (needs 0 < E < V0)."""


class DomainError(PhysicsDomainError):
    """A closed-form expression would take an imaginary root or divide by zero."""


class RegionMismatch(PhysicsDomainError):
    """A coordinate lies outside the region the state belongs to."""


class AmplitudeTooLarge(PhysicsDomainError):
    """Momentum-field amplitude violates p_P**2 * A_p**2 < hbar**2."""


class TimeBeforePreparation(PhysicsDomainError):
    pass


class OutOfSlit(PhysicsDomainError):
    pass


class ZeroTime(PhysicsDomainError):
    pass


class NegativeTime(PhysicsDomainError):
    pass


class NonNullAmplitude(PhysicsDomainError):
    """Pair momenta requested in null-field mode while amplitudes are nonzero."""


class NumericsError(PFError, ArithmeticError):
    """A numerical routine failed to reach its requested accuracy."""


class NonConvergent(NumericsError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate and its error bound are kept on the exception.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonDecaying(NumericsError):
    """A sampled field does not vanish at the edges of its grid."""


class NotNormalizable(NumericsError):
    pass


class InsufficientSamples(NumericsError):
    pass


class LedgerMismatch(NumericsError):
    """Energy components do not add up to the stated total."""
