"""Solver failure modes that callers may want to catch."""


class MppdgError(Exception):
    """Base class for solver errors."""


class CflViolationError(MppdgError):
    """First-order scheme left the bounds: the time step is too large."""


class NumericalFailureError(MppdgError):
    """NaN or Inf appeared during flux or RHS evaluation."""


class SolvabilityError(MppdgError):
    """Poisson right-hand side has a mean too large for a periodic solve."""
