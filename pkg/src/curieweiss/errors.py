"""Exception types shared across the package."""


class CurieWeissError(Exception):
    """Base class for package-specific failures."""


class InfeasibleMoments(CurieWeissError, ValueError):
    """Moment vector lies outside the image of the probability simplex."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        # list of (spin value, weight) pairs that came out negative
        self.violations = violations or []


class NonConvergence(CurieWeissError, RuntimeError):
    """Iterative solver hit its cap; carries the best iterate seen."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoSolutionInBracket(CurieWeissError, RuntimeError):
    """Bracketed root search found no sign change."""


class EnsembleTooLarge(CurieWeissError, ValueError):
    """Composition count exceeds the enumeration cap."""
