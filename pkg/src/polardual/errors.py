"""Exception hierarchy.

Everything raised on bad user input derives from :class:`ValidationError`;
the CLI maps that family to exit code 2.
"""


class PolarDualError(Exception):
    pass


class ValidationError(PolarDualError, ValueError):
    pass


class NonSquare(ValidationError):
    pass


class Singular(ValidationError, ArithmeticError):
    pass


class NotSkew(ValidationError):
    pass


class OddDimension(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class InvalidType(ValidationError):
    """A type vector with a nonpositive entry or a broken divisibility chain.

    ``index`` is the first offending position (0-based).
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PairingViolation(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class GeneratorMismatch(ValidationError):
    pass


class OddDegreeInput(ValidationError):
    pass


class BoundTooLarge(PolarDualError):
    pass


class IntegralityFailure(PolarDualError, ArithmeticError):
    pass


class IllConditioned(PolarDualError, ArithmeticError):
    pass


class ConventionMismatch(PolarDualError):
    pass


class RankMismatch(PolarDualError):
    pass
