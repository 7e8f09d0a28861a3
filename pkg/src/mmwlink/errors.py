"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter set violates its documented constraints."""


class ShapeError(ValueError):
    """An array input has the wrong length or layout."""


class ScenarioFormatError(ConfigurationError):
    """A scenario file is malformed; message names the section and key."""
