"""Exception classes.

Structural failures derive from :class:`ValidationError`; malformed input
files raise :class:`ParseError`.  The CLI maps the two families onto
different exit codes.
"""


class QmetError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QmetError, ValueError):
    """An object failed one of its structural checks."""


class ParseError(QmetError):
    """A data file or scenario could not be parsed."""


class NotHermitian(ValidationError):
    pass


class NotClosed(ValidationError):
    pass


class NoUnit(ValidationError):
    pass


class BadBlocks(ValidationError):
    pass


class AlgebraMismatch(ValidationError):
    pass


class NotAState(ValidationError):
    pass


class NotHomomorphism(ValidationError):
    pass


class NotCoassociative(ValidationError):
    pass


class NoHaar(ValidationError):
    pass


class NonUniqueHaar(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotAGroup(ValidationError):
    pass


class MissingBlockData(ValidationError):
    pass


class NotUnital(ValidationError):
    pass


class NotInjective(ValidationError):
    pass


class NotCoaction(ValidationError):
    pass


class NotInvariant(ValidationError):
    pass


class NotInvariantMeasure(ValidationError):
    pass


class InconsistentVerdict(QmetError):
    """The two ergodicity criteria disagree at the final net index."""
