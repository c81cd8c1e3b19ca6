"""Exception types shared across the package.

Index computations return discrete values, so anything that would force a
judgement call near a numerical threshold is raised as an error instead of
being rounded away.  Every exception derives from :class:`SymindexError` so
callers (CLI, HTTP service) can map the whole family to one failure mode.
"""


class SymindexError(Exception):
    """Base class for all errors raised by this package."""


class NonSquareError(SymindexError):
    """A matrix expected to be square is not."""


class NonFiniteError(SymindexError):
    """A matrix contains NaN or infinite entries."""


class OddDimensionError(SymindexError):
    """A matrix expected to have even dimension does not."""


class NotSymplecticError(SymindexError):
    """A matrix fails the symplecticity residual test."""


class DimensionMismatchError(SymindexError):
    """Operands have incompatible shapes."""


class DegenerateFormError(SymindexError):
    """A symmetric form has an eigenvalue inside the zero threshold, so its
    signature is not numerically well defined."""


class IllConditionedError(SymindexError):
    """A linear solve exceeded the condition-number guard."""


class InvalidBlocksError(SymindexError):
    """A block tuple violates the symmetric return-map identities."""


class CSingularError(SymindexError):
    """The lower-left block C is numerically singular."""


class IterateDegenerateError(SymindexError):
    """The iterate-k index formula is not defined (U_{k-1}(A) singular or
    det(Phi^k - I) below threshold)."""


class AsymmetryTooLargeError(SymindexError):
    """A matrix that should be symmetric in exact arithmetic is too far from
    symmetric, which signals invalid input rather than roundoff."""


class NotTransverseError(SymindexError):
    """Two Lagrangian subspaces required to be transverse are not."""


class QNotSymmetricError(SymindexError):
    """The assembled quadratic form is not symmetric, which signals a
    non-symplectic input."""


class UnresolvedCrossingError(SymindexError):
    """A crossing of two Lagrangian paths could not be resolved to an
    isolated, regular crossing; the caller should perturb and retry."""


class DegenerateEndpointError(SymindexError):
    """A symplectic path ends on the Maslov cycle (det(Psi(1) - I) = 0)."""


class PathIndexMismatchError(SymindexError):
    """Two independently generated paths to the same endpoint produced
    different index values; the computation is unreliable."""


class NoConvergenceError(SymindexError):
    """An iterative solver ran out of iterations."""


class CriticalPointError(SymindexError):
    """The Hamiltonian gradient vanishes where the construction needs it
    not to."""


class DegenerateTransversalError(SymindexError):
    """No sampled transversal vector v with dH(x)v bounded away from zero
    was found."""


class UnequalEigenspacesError(SymindexError):
    """The +1/-1 eigenspaces of the restricted involution do not have equal
    dimension."""


class ProjectionIllConditionedError(SymindexError):
    """Expressing the monodromy in the section basis lost too much
    accuracy."""


class StepFailureError(SymindexError):
    """The ODE integrator failed to complete the requested time span."""


class EnergyDriftExceededError(SymindexError):
    """Integration accuracy checks (energy conservation, symplecticity of
    the fundamental matrix) failed."""


class MalformedInputError(SymindexError):
    """An input document could not be parsed or fails validation."""
