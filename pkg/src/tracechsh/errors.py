class TraceCHSHError(Exception):
    """Base class for package errors."""


class ConfigurationError(TraceCHSHError):
    """A rule table or configuration cannot be used (e.g. a cyclic rewrite)."""


class UnresolvedExpectation(TraceCHSHError):
    """A vacuum expectation reached a word with no declared value."""

    def __init__(self, word):
        self.word = tuple(word)
        names = " ".join(g.name for g in self.word)
        super().__init__(f"unresolved expectation <{names}>")


class DerivationFailure(TraceCHSHError):
    """A symbolic reduction did not reproduce the expected identity.

    ``residual`` is the exact polynomial (derived - expected); ``derived``
    holds whatever the reduction actually produced.
    """

    def __init__(self, message, residual, derived=None):
        self.residual = residual
        self.derived = derived
        super().__init__(f"{message}; residual = {residual}")


class InvalidRealization(TraceCHSHError):
    """A matrix realization violates one of its structural invariants."""
