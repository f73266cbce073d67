"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QuantoposError`,
so callers (the CLI in particular) can separate input problems from bugs.
"""


class QuantoposError(Exception):
    """Base class for all package errors."""


class InputError(QuantoposError, ValueError):
    """The caller passed data that violates a documented precondition."""


class NonHermitian(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonCommutingGenerators(InputError):
    pass


class NonCommutativeResult(QuantoposError):
    """A double commutant expected to be commutative was not."""


class UnknownLabel(InputError, KeyError):
    pass


class TooManyObservables(InputError):
    pass


class NonCommutativePreimage(QuantoposError):
    """The classical preimage of an algebra contains non-commuting observables."""


class FlatEscapesPoset(QuantoposError):
    pass


class UnknownObject(InputError, KeyError):
    pass


class InvalidSieve(InputError):
    pass


class SearchSpaceTooLarge(QuantoposError):
    pass


class NotASubobject(InputError):
    pass


class MalformedDiagram(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class ProperCategoryMissing(InputError):
    """The chosen prequantization category does not contain every psi-image."""


class SheafCriteriaDisagree(QuantoposError):
    """The three sheaf criteria gave different answers (always a bug)."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class ParseError(InputError):
    pass


class UnknownArtifact(InputError):
    pass
