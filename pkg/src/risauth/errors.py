"""Exception types raised across the package."""

from __future__ import annotations


class RegistrationError(Exception):
    """A tag id is registered twice."""


class UnknownTagError(KeyError):
    """Authentication or baseline lookup for an id that was never registered."""


class InsufficientDataError(ValueError):
    """Too few pilot measurements to estimate a baseline."""


class ConfigError(ValueError):
    """Invalid experiment configuration. ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
