"""Exception hierarchy shared by every module of the package."""


class ThermalG2Error(Exception):
    """Base class for all package errors."""


class ConfigurationError(ThermalG2Error, ValueError):
    """A physical or geometric parameter is out of its valid domain."""


class UnsupportedLayoutError(ThermalG2Error, ValueError):
    """The operation is undefined for this kind of layout."""


class InvalidPairError(ThermalG2Error, ValueError):
    """A two-photon amplitude was requested for a single mode (m == n)."""


class EstimationError(ThermalG2Error, RuntimeError):
    """A Monte Carlo estimate cannot be formed from the requested samples."""


class ConfigParseError(ConfigurationError):
    """An experiment config file is malformed; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
