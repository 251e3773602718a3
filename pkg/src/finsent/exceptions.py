"""Exception types raised across the package."""


class FinsentError(Exception):
    """Base class for errors raised by finsent."""


class ValidationError(FinsentError, ValueError):
    """Input data or configuration violates a documented invariant."""


class ParseError(FinsentError, ValueError):
    """An input file could not be decoded."""


class SingularMatrixError(FinsentError, ArithmeticError):
    """Normal equations have no unique solution (e.g. ridge=0, rank-deficient X)."""


class DegenerateGoldError(FinsentError, ValueError):
    """R^2 is undefined because the gold scores have zero variance."""


class ZeroVectorError(FinsentError, ValueError):
    """Cosine similarity is undefined for a zero-norm vector."""


class NotFittedError(FinsentError, AttributeError):
    """An estimator was used before ``fit``."""
