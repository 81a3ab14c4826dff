"""Centralized logging for the capture-series package.

All modules import their logger from here instead of calling
``logging.getLogger(__name__)`` directly, so handler setup and any future
change to the log format live in one place.

Usage::

    from ._log import get_logger

    _LOGGER = get_logger(__name__)
"""

from __future__ import annotations

import logging
import sys

from .const import LOG_FORMAT, PACKAGE_LOGGER


def get_logger(name: str) -> logging.Logger:
    """Return a standard :class:`logging.Logger` for *name*."""
    return logging.getLogger(name)


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """Attach a stderr handler to the package logger and set its level.

    ``0`` keeps the package quiet (WARNING), ``1`` shows results (INFO) and
    ``2`` or more shows the full computation trail (DEBUG).  Calling it again
    replaces the handler rather than stacking a second one, so the CLI can be
    invoked repeatedly in one process (tests do this).
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_capture_series", False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._capture_series = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
