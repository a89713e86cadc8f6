"""Exception and warning types shared across the package."""


class FrameError(Exception):
    """Base class for every error raised by this package."""


class BadShape(FrameError, ValueError):
    pass


class DimensionMismatch(FrameError, ValueError):
    pass


class NotAFrame(FrameError):
    """The columns do not span the ambient space at the requested tolerance."""


class NotADual(FrameError):
    """A candidate dual fails the reconstruction identity."""


class MrcViolated(FrameError):
    """The surviving elements do not span the space (minimal redundancy condition fails)."""


class BadErasure(FrameError, ValueError):
    pass


class BadK(BadErasure):
    pass


class ConstructionError(FrameError):
    """A reduced-dual construction is not well defined for the given input.

    ``kind`` is the stable name used in reports, CSV status cells and CLI
    messages.
    """

    kind = "ConstructionError"


class SingularGram(ConstructionError):
    kind = "SingularGram"


class SingularOperator(ConstructionError):
    kind = "SingularOperator"


class DenominatorVanishes(ConstructionError):
    kind = "DenominatorVanishes"

    def __init__(self, step: int, value: complex):
        self.step = step
        self.value = value
        super().__init__(
            f"iterative denominator 1 - <v_j, x_j> vanishes at step j={step} "
            f"(value {value!r})"
        )


class MrcRetryExhausted(FrameError):
    pass


class IllConditioned(UserWarning):
    """Frame operator condition estimate exceeds the configured limit."""


class ConditionExceeded(UserWarning):
    """A reduced-dual solve succeeded but its system is badly conditioned."""
