"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a structural contract (norm, Hermiticity, size)."""


class GuardError(ValueError):
    """A requested size exceeds a documented computational guard."""


class StabilityError(RuntimeError):
    """The explicit integrator step is too large for the given Hamiltonian."""
