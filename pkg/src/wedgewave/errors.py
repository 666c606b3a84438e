"""Exception types shared across the package."""


class WedgeWaveError(Exception):
    """Base class for all domain errors raised by this package."""


class ConstraintViolation(WedgeWaveError):
    """An input violates a documented precondition; the message names the inequality."""


class RootBracketFailure(WedgeWaveError):
    """The Rayleigh function did not change sign on the search interval."""


class NotIntegrable(WedgeWaveError):
    """Half-line integral of a term with zero decay rate was requested."""


class GridTooCoarse(WedgeWaveError):
    """A half-line discretization failed its refinement consistency check."""


class DegenerateDenominator(WedgeWaveError):
    """A Green's-formula pairing denominator is numerically zero."""


class AboveCutoff(WedgeWaveError):
    """A decay rate was requested for a frequency at or above the cutoff."""


class MeshGenFailure(WedgeWaveError):
    """Wedge mesh generation failed; the message carries diagnostics."""


class AssemblyFailure(WedgeWaveError):
    """Finite-element assembly produced an invalid system (e.g. non-SPD mass)."""


class NoConvergence(WedgeWaveError):
    """The eigensolver did not reach the requested residual tolerance."""


class NotTrapped(WedgeWaveError):
    """No trapped mode below the cutoff was found where one was required."""


class TruncationSuspect(WedgeWaveError):
    """The computed mode is not sufficiently localized inside the truncated domain."""
