"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateSpectral(ArithmeticError):
    """The spectral parameter g2 (g3 + 1) / g3 is undefined or zero.

    Happens at t = 0, for pure immigration (no accumulated death intensity)
    and when no immigrant can have arrived (g2 = 0). Callers should fall back
    to the finite-sum expression.
    """


class IntegrationFailure(RuntimeError):
    def __init__(self, message, t_reached):
        super().__init__(f"{message} (reached t={t_reached!r})")
        self.t_reached = t_reached


class ResourceError(RuntimeError):
    """A truncation would need more states than the hard limit allows."""


class PrecisionLoss(ArithmeticError):
    """A computed probability fell outside [0, 1] by more than rounding allows."""
