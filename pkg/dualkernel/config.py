"""Runtime settings for the kernels and the drivers around them."""

import logging
import os
import sys
from dataclasses import dataclass, replace

from dualkernel.errors import ConfigurationError

DEFAULT_FUEL = 10_000
DEFAULT_MAX_CLASSES = 256
DEFAULT_LOG_LEVEL = "WARNING"

FUEL_ENV = "DUALKERNEL_FUEL"
MAX_CLASSES_ENV = "DUALKERNEL_MAX_CLASSES"
LOG_LEVEL_ENV = "DUALKERNEL_LOG_LEVEL"

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass(frozen=True)
class Settings:
    """Fuel per evaluation, representative bound and log level."""

    fuel: int = DEFAULT_FUEL
    max_classes: int = DEFAULT_MAX_CLASSES
    log_level: str = DEFAULT_LOG_LEVEL

    def __post_init__(self):
        if not isinstance(self.fuel, int) or self.fuel < 1:
            raise ConfigurationError(f"fuel must be a positive integer, got {self.fuel!r}")
        if not isinstance(self.max_classes, int) or self.max_classes < 1:
            raise ConfigurationError(
                f"max_classes must be a positive integer, got {self.max_classes!r}"
            )
        if not isinstance(logging.getLevelName(str(self.log_level).upper()), int):
            raise ConfigurationError(f"unknown log level {self.log_level!r}")

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        return cls(
            fuel=_int_from_env(environ, FUEL_ENV, DEFAULT_FUEL),
            max_classes=_int_from_env(environ, MAX_CLASSES_ENV, DEFAULT_MAX_CLASSES),
            log_level=environ.get(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL),
        )

    def override(self, fuel=None, max_classes=None, log_level=None):
        """Return a copy with every non-None argument applied."""
        changes = {
            key: value
            for key, value in (("fuel", fuel), ("max_classes", max_classes), ("log_level", log_level))
            if value is not None
        }
        return replace(self, **changes)


def _int_from_env(environ, name, default):
    raw = environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from None


def configure_logging(level=DEFAULT_LOG_LEVEL):
    # stderr only: --json output on stdout must stay byte-stable
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)
