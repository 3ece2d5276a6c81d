"""Exception types shared across the lab."""


class NumericalError(RuntimeError):
    """A run produced a numerically invalid state.

    ``at`` locates the failure: an iteration index for discrete methods, a
    time for ODE integrations.
    """

    def __init__(self, message, at=None):
        super().__init__(message)
        self.at = at


class IntegrationError(NumericalError):
    """ODE integration failed (step underflow, step budget, non-finite state)."""
