"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside its physically meaningful domain."""


class UnsupportedOrderError(DomainError):
    """A tabulated closed-form coefficient was requested beyond the available orders."""


class TruncationError(RuntimeError):
    """The photon-number expansion hit its hard cap before the tail converged.

    ``partial_mass`` is the probability mass accumulated up to the cap and
    ``partial`` the truncated distribution itself, so callers that can tolerate
    a bounded remainder may still proceed.
    """

    def __init__(self, message: str, partial_mass: float, partial=None):
        super().__init__(message)
        self.partial_mass = partial_mass
        self.partial = partial


class InsufficientTruncationError(TruncationError):
    """A Fock-sum oracle cannot reach its accuracy target at the requested order."""


class DegenerateInputError(ValueError):
    """Inputs collapse a formula to an undefined expression (e.g. zero detection probability)."""


class ConfigurationError(ValueError):
    """A run-configuration entry is missing, malformed, or inconsistent."""
