"""Exception hierarchy for the simulator."""


class QKDSimError(Exception):
    """Base class for all simulator errors."""


class InvalidGridSize(QKDSimError):
    """Grid side length is too small to host Alice and Bob at opposite corners."""


class InvalidPlacement(QKDSimError):
    """A trusted-node placement cannot be resolved on the requested grid."""


class InvalidParameter(QKDSimError):
    """A numeric parameter is outside its allowed range."""


class InvalidNode(QKDSimError):
    """An operation restricted to repeaters was applied to a party node."""


class InconsistentPairing(QKDSimError):
    """A repeater pairing references an edge that is not entangled this round."""


class ConfigError(QKDSimError):
    """A run configuration (CLI flags or config file) failed validation."""
