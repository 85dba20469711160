"""Exception hierarchy for the package.

Every error raised on purpose derives from ConsensusError so callers (and the
command-line front end) can map failure classes to exit codes without string
matching.
"""


class ConsensusError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ConsensusError, ValueError):
    """An array or matrix has the wrong dimensions for the operation."""


class TopologyError(ConsensusError, ValueError):
    """A graph or weight matrix violates a structural requirement."""


class ConstructionError(TopologyError):
    """A requested network cannot be realised (e.g. sampling never connects)."""


class ConfigError(ConsensusError, ValueError):
    """A configuration document is malformed or contains invalid values."""


class DomainError(ConsensusError, ValueError):
    """A numeric parameter lies outside the mathematical domain of a formula."""


class NumericError(ConsensusError, ArithmeticError):
    """Non-finite values appeared where finite numbers are required."""


class ConsistencyError(ConsensusError, ValueError):
    """Two artifacts that must describe the same run do not match."""


class StorageError(ConsensusError, OSError):
    """Reading or writing an artifact on disk failed."""
