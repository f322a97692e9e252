"""Exception and warning types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical procedure failed in a way that invalidates its result."""


class PoleProximityError(NumericalError):
    """A rational approximant was evaluated too close to a denominator root."""


class FitQualityError(NumericalError):
    """An approximant fit left a residual above the acceptable threshold."""


class ExtrapolationWarning(UserWarning):
    """An approximant was evaluated outside the interval it was built on."""
