"""Exception types shared across the package."""


class MembranePercError(Exception):
    """Base class for all package errors."""


class EmptyInput(MembranePercError):
    """An operation that needs at least one element got none."""


class InvalidRate(MembranePercError):
    """Poisson intensity must be strictly positive."""


class TooCoarse(MembranePercError):
    """Disk discretization needs at least 8 polygon sides."""


class ParseError(MembranePercError):
    """A scene/framework file is malformed; message carries field or line info."""


class BadOrigin(MembranePercError):
    """Growth origin is not a disk hole of the scene."""


class TooLarge(MembranePercError):
    """Instance exceeds the exhaustive-search size guard."""


class DegenerateLifting(MembranePercError):
    """Two holes carry (numerically) identical lifting planes."""


class InternalInconsistency(MembranePercError):
    """A cross-check that should hold by construction failed."""


class MissingLayer(MembranePercError):
    """A render layer was requested but its data was not supplied."""
