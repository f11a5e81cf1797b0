class LGDotError(Exception):
    """Base class for all errors raised by lgdot."""


class InputError(LGDotError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateError(LGDotError, ArithmeticError):
    """A normalisation or conditioning denominator vanished."""


class InvariantError(LGDotError, RuntimeError):
    """A computed state broke an invariant it is guaranteed to satisfy."""


class DegenerateSplittingWarning(UserWarning):
    """Phonon flips were dropped because the fine-structure splitting is zero."""
