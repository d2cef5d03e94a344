"""Shared exception types. The CLI maps these onto exit codes."""


class CapExceededError(RuntimeError):
    """A configured resource cap (domain size, tuple budget, search space) was hit."""


class CoverageError(CapExceededError):
    """A sphere coloring could not account for a queried direction."""


class SignatureMismatchError(ValueError):
    """Two structures that were expected to share a signature do not."""


class NotAHomomorphismError(ValueError):
    """A claimed homomorphism fails to preserve some relation tuple."""


class ImperfectStrategyError(ValueError):
    """A translation requiring a perfect strategy was given an imperfect one."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
