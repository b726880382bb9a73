# src/exceptions.py
"""Errors raised when a precondition of a check or construction is violated.

Failed identities are never raised; they end up in reports. Every error
carries an optional ``witness`` (an element, a point, a block index) that
the CLI and the HTTP layer serialize next to the message.
"""


class CovalgError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_dict(self):
        data = {"type": type(self).__name__, "message": self.message}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


class MalformedInput(CovalgError):
    """Input payload could not be decoded or validated."""


class AlgebraMismatch(CovalgError):
    """Operands live over different algebras."""


class NotPartialIsometry(CovalgError):
    pass


class NotProjection(CovalgError):
    pass


class NotInvariant(CovalgError):
    """A map sends the algebra outside itself."""


class NotAnInteraction(CovalgError):
    """A check that presupposes the interaction axioms was called without them."""


class NotPositive(CovalgError):
    """A map that should be positive does not preserve adjoints or positivity."""


class HypothesisFailed(CovalgError):
    """One of the hypotheses of the projection-family dual construction fails."""

    def __init__(self, message, item=None, witness=None):
        super().__init__(message, witness=witness)
        self.item = item

    def to_dict(self):
        data = super().to_dict()
        data["item"] = self.item
        return data


class SingularRestriction(CovalgError):
    """The action is not injective on the corner it should invert on."""


class InvalidRepresentation(CovalgError):
    """sigma is not a unital *-monomorphism."""


class WindowTooSmall(CovalgError):
    pass


class NotUnimodular(CovalgError):
    pass


class AmbiguousBlock(CovalgError):
    pass


class FormError(CovalgError):
    """Element has a monomial with more than one step symbol."""


class HypothesisError(CovalgError):
    """Block dynamics fix or collide at the block under test."""


class InvalidCocycle(CovalgError):
    pass
