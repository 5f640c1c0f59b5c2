# -*- coding: utf-8 -*-
"""
Exception hierarchy shared by the simulator, the config layer and the CLI.
The CLI maps these onto its exit codes.
"""


class SourceSeekingError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(SourceSeekingError):
    """A scenario configuration could not be loaded or failed validation."""

    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        where = f"'{key}'" if key else "configuration"
        super().__init__(f"{where}: {reason}")


class ContractViolation(SourceSeekingError):
    """An operation was called in a supervisor mode that does not allow it."""


class DegenerateGeometryError(SourceSeekingError, ValueError):
    """Coincident agents or an edge set that does not span the plane."""


class NoSignalError(SourceSeekingError):
    """All intensity differences vanish, so no direction can be formed."""


class InvalidMeasurementError(SourceSeekingError, ValueError):
    """A non-finite value was fed to an estimator."""


class SimulationError(SourceSeekingError):
    """The integrated state stopped being finite; the run is aborted."""
