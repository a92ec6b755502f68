"""Exception hierarchy.

Every error raised for bad user input derives from :class:`ValidationError`
so the command line can map it to exit code 2 in one place.
"""


class FFHarmError(Exception):
    """Base class for all package errors."""


class ValidationError(FFHarmError, ValueError):
    """Invalid parameters or inputs."""


# field
class NonPrime(ValidationError):
    pass


class EvenCharacteristic(ValidationError):
    pass


class ReducibleModulus(ValidationError):
    pass


class MixedFields(ValidationError):
    pass


class DivisionByZero(FFHarmError, ZeroDivisionError):
    pass


# charsums
class ZeroLeadingCoefficient(ValidationError):
    pass


# variety
class DegenerateForm(ValidationError):
    pass


class NotDiagonal(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class NoSquareRatio(ValidationError):
    pass


class ConstructionInapplicable(ValidationError):
    pass


# fourier / operators
class BadExponent(ValidationError):
    pass


class SideMismatch(ValidationError):
    pass


class NotIndicator(ValidationError):
    pass


class NegativeInput(ValidationError):
    pass


# norms
class ZeroWitness(ValidationError):
    pass


class NotL2(ValidationError):
    pass


class NonConvergence(FFHarmError):
    """Raised only on request; estimators normally flag and return best-so-far."""


# experiments
class TooFewPoints(ValidationError):
    pass


class NonPositiveValue(ValidationError):
    pass


class BadDimension(ValidationError):
    pass


class BadSubspaceDim(ValidationError):
    pass


class BadScheme(ValidationError):
    pass


class UnknownSuite(ValidationError):
    pass


# cli
class CorruptCacheEntry(FFHarmError):
    pass
