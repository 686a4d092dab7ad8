"""Exception hierarchy for shadowqec.

Validation errors describe bad inputs and map to CLI exit code 2.
Numerical errors come from solvers and fits and map to exit code 3.
"""


class ShadowQECError(Exception):
    """Base class for all shadowqec errors."""


class NumericalError(ShadowQECError):
    """A solver, integrator or fit could not produce a trustworthy result."""


# Validation family

class InvalidDimensionError(ShadowQECError, ValueError):
    """Mode dimension too small for the requested operator."""


class DimensionMismatchError(ShadowQECError, ValueError):
    """Operands do not share a dimension."""


class UnknownModeError(ShadowQECError, KeyError):
    """Mode label not present in the tensor space."""


class OutOfRangeError(ShadowQECError, ValueError):
    """Index or occupation outside the truncated space."""


class ResolutionError(ShadowQECError, ValueError):
    """Sampling step too coarse for the noise process."""


class BandConfigError(ShadowQECError, ValueError):
    """1/f synthesis band inconsistent with the trace length or step."""


class InfeasiblePlanError(ShadowQECError, ValueError):
    """No positive drive tones satisfy the frequency constraints."""


# Numerical family

class StiffnessError(NumericalError):
    """Adaptive step size underflowed."""


class IntegrationFailureError(NumericalError):
    """Density matrix left the physical set beyond tolerance."""


class CapacityError(NumericalError):
    """Superoperator would exceed the supported dimension."""


class EigenSolverError(NumericalError):
    """Eigen-decomposition failed to converge."""


class FitError(NumericalError):
    """Decay fit could not be performed."""


class TooFewPointsError(FitError):
    """Fewer samples than the fit requires."""


class NonPositiveSignalError(FitError):
    """Signal above the floor is not strictly positive on the fit window."""


class UnidentifiableError(FitError):
    """Lifetime cannot be identified from the data."""


class RankDeficientError(NumericalError):
    """Regression design matrix does not have full column rank."""


class UndefinedRateError(NumericalError):
    """Rate formula has a vanishing denominator."""


class BracketError(NumericalError):
    """Root bracket does not straddle the target."""


class ConvergenceError(NumericalError):
    """Basis cutoff or grid did not converge."""


class InvalidStateError(ShadowQECError, ValueError):
    """Density matrix is not Hermitian with unit trace."""
