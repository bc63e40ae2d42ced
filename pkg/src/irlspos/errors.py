"""Shared exception types."""


class ConfigError(ValueError):
    """A scenario, band, or file-level configuration is invalid."""


class GeometryError(ValueError):
    """A station layout cannot support a 2D position fix."""
