"""Exception types raised by the solvers and transforms."""


class WhithamLabError(Exception):
    """Base class for every error raised by this package."""


class NonZeroMean(WhithamLabError, ValueError):
    """A primitive was requested for a field whose mean is not negligible."""


class NonFinite(WhithamLabError, FloatingPointError):
    """A field contains NaN/Inf, or a run blew up past the detection threshold."""


class GridMismatch(WhithamLabError, ValueError):
    """Two fields living on different grids were combined."""


class CavitationViolated(WhithamLabError, ValueError):
    """The water depth 1 + eps*zeta dropped below h_min somewhere."""


class TruncationUnsupported(WhithamLabError, ValueError):
    """The requested Dirichlet-Neumann expansion order is not implemented."""


class ChartMismatch(WhithamLabError, ValueError):
    """A state was passed in a coordinate chart the operation does not accept."""


class CflViolated(WhithamLabError, ValueError):
    """The time step is too large for the current state."""
