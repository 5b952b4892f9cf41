"""Exception and warning types shared across the package."""

from __future__ import annotations


class CatGLMError(Exception):
    """Base class for all package errors."""


class DomainError(CatGLMError, ValueError):
    """An argument lies outside the domain of a cdf or quantile function."""

    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value


class UnsupportedReflectionError(CatGLMError):
    """The reflected cdf F~(w) = 1 - F(-w) is not in the supported family set."""


class ConstraintViolation(CatGLMError):
    """Linear predictors left the admissible set at some observations.

    Raised for unordered cumulative predictors and for predictors outside the
    support of the exponential / Pareto cdfs. Recoverable by step halving.
    """

    def __init__(self, message: str, indices=()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


class InvalidRatioError(ConstraintViolation):
    """A cumulative ratio vector is not strictly increasing."""


class NumericalFailure(CatGLMError):
    """Non-finite values appeared during evaluation."""


class ModelUndefinedError(CatGLMError):
    """The model cannot be fitted or evaluated on the data (cumulative or support constraints)."""


class SingularInformationError(CatGLMError):
    """The Fisher information is singular even after the ridge fallback."""


class HypothesisError(CatGLMError, ValueError):
    """A transform plan was requested for a model that does not meet its hypotheses."""


class CyclicConstraintError(CatGLMError, ValueError):
    """Order constraints contain a cycle."""


class ConvergenceWarning(UserWarning):
    """Fisher scoring stopped before meeting the convergence criteria."""
