"""Exception hierarchy for exclusim."""


class ExclusimError(Exception):
    """Base class for all exclusim errors."""


class ConfigError(ExclusimError):
    """Invalid configuration file or experiment parameters."""


class InvalidGraphError(ExclusimError):
    """Graph construction parameters violate an invariant."""


class HorizonError(ExclusimError):
    """A query time exceeds the horizon of an event log."""


class TooLargeError(ExclusimError):
    """Dense kernel requested on a graph above the size guard."""


class NumericalError(ExclusimError):
    """A numerical routine produced nonfinite values or failed to converge."""


class ResolutionError(ExclusimError):
    """PDE solve resolution too coarse for the requested accuracy."""


class UnsupportedTopologyError(ExclusimError):
    """Operation only defined for a restricted graph topology."""


class InvalidProfileError(ExclusimError):
    """Density profile takes values outside [0, 1] at some vertex."""
