"""Exception types shared across the package.

Everything derives from MicrotwinError so callers can catch broadly; the
ValueError/RuntimeError mixins keep the types usable with idiomatic except
clauses.
"""


class MicrotwinError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MicrotwinError, ValueError):
    """An input is outside the mathematical domain of the operation."""


class UnsupportedOrderError(DomainError):
    """A derivative order beyond what the potential provides was requested."""


class DivergenceError(MicrotwinError, ValueError):
    """The requested series/sum does not converge for these parameters."""


class InsufficientDataError(MicrotwinError, ValueError):
    """Not enough data points to perform the requested fit."""


class NoLimitError(MicrotwinError, RuntimeError):
    """A sequence shows no second-order limit (fit residuals do not decay)."""


class AmbiguousSideError(MicrotwinError, ValueError):
    """A one-sided quantity was requested at a breakpoint without a side."""


class ConvergenceError(MicrotwinError, RuntimeError):
    """An iterative procedure failed to converge or to certify its result."""


class BracketingError(MicrotwinError, RuntimeError):
    """A root bracket shows no sign change even after widening."""


class BracketWarning(UserWarning):
    """A discrete search ended on the boundary of its bracket."""
