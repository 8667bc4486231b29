"""Exception hierarchy for the solver.

Every failure the library can report derives from :class:`CGLError`, so a
caller that only wants to know "did the run fail?" can catch one type.
"""


class CGLError(Exception):
    """Base class for all solver errors."""


class NonPhysical(CGLError):
    """A state lost positivity (rho, p_par or p_perp <= 0)."""

    def __init__(self, message, index=None, time=None):
        super().__init__(message)
        self.index = index
        self.time = time


class DegenerateField(CGLError):
    """|B| is too small for the field direction b to be defined."""


class NotHyperbolic(CGLError):
    """A state lies outside the hyperbolicity region (negative radicand)."""


class IllConditioned(CGLError):
    """The eigenvector matrix is numerically singular."""


class UnknownProblem(CGLError, KeyError):
    """The requested test problem id is not registered."""


class NoExactSolution(CGLError):
    """The problem has no closed-form solution to compare against."""


class NoConvergence(CGLError):
    """An iterative oracle failed to reach its residual tolerance."""


class ConfigError(CGLError, ValueError):
    """A run configuration is malformed or out of range."""
