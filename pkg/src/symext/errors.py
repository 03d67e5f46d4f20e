"""Exception types shared across the package."""


class NotAStateError(ValueError):
    """Input violates the state-space constraints beyond numerical slack."""


class DegenerateInputError(ValueError):
    """Operation is undefined for this input (division by a vanishing quantity)."""


class SolverFailure(RuntimeError):
    """A numerical routine failed to converge within its iteration budget."""


class CertificateError(RuntimeError):
    """A certificate or lifted extension failed its postconditions.

    This indicates an internal inconsistency, never a property of the state.
    """
