"""Exception hierarchy.

``ValidationError`` covers malformed input (CLI exit code 1);
``NumericalError`` covers recoveries that cannot proceed on valid input
(CLI exit code 2).
"""


class LowredError(Exception):
    pass


class ValidationError(LowredError, ValueError):
    pass


class NumericalError(LowredError, ArithmeticError):
    pass


class InadmissibleNoiseError(NumericalError):
    """Noise too large for the sample floor, or a non-positive sample."""


class DegenerateNullSpaceError(NumericalError):
    """The kernel operator does not have a numerically one-dimensional null space."""


class InterpolationError(NumericalError):
    """An interpolant that should be real has a significant imaginary part."""
