"""Exception types shared across the laboratory."""


class DynsampLabError(Exception):
    """Base class for all library errors."""


class InvalidInput(DynsampLabError, ValueError):
    """Malformed or inconsistent input data (shapes, NaNs, zero weights)."""


class HypothesisViolated(DynsampLabError):
    """A mathematical hypothesis required by an operation does not hold."""


class NotPositiveSemidefinite(HypothesisViolated):
    """Matrix has an eigenvalue below the negative-dust threshold."""


class NotAFrame(HypothesisViolated):
    """System lacks a positive lower frame bound where one is required."""


class InvalidHypothesis(HypothesisViolated):
    """Certificate hypothesis fails structurally (non-invariant subspace,
    vector outside the designated subspace, contraction factor >= 1)."""


class DivergentSeries(DynsampLabError):
    """Operator series does not converge (spectral radius >= 1)."""


class NoConvergence(DynsampLabError):
    """Iteration cap reached or residual above tolerance."""
