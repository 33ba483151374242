"""Exception types shared across the package.

Everything raised on bad input derives from ValueError, everything raised when
a run cannot produce a result derives from RuntimeError, so callers can catch
broadly without importing each class.
"""


class DimensionError(ValueError):
    """Operands live in Hilbert spaces of incompatible dimension."""


class InvariantError(ValueError):
    """A constructed object violates one of its defining invariants."""


class PostSelectionImpossible(RuntimeError):
    """The post-selection state is orthogonal to every branch of the coupled state."""


class NotInStrongRegime(ValueError):
    """Pointer branch separations are too small for unambiguous readout classification."""


class NearOrthogonalPrePost(ValueError):
    """Pre- and post-selected states overlap below the configured threshold."""


class NoAcceptedTrials(RuntimeError):
    """Every Monte Carlo trial failed post-selection; no estimate exists."""


class TooLargeForOracle(ValueError):
    """The requested brute-force computation exceeds the dense-space bound."""


class NoConsistentHistory(ValueError):
    """The final boundary condition is orthogonal to every forward branch."""


class OrthogonalCollapseForbidden(ValueError):
    """A collapse state orthogonal to the recorded branch would erase the record."""


class ConfigError(ValueError):
    """Malformed experiment configuration (unknown key, bad value, bad seed)."""
