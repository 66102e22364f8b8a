"""
Logging Configuration Module

Provides centralized logging configuration for Loccsmith.
All modules should use this for consistent log output.

Logs always go to stderr; stdout is reserved for the reports the CLI
prints, so a run can be piped into a file without log noise.

This is CORE functionality - required for Loccsmith to work.
"""

import json
import logging
import sys
from typing import Any, Dict, Optional, Union

ROOT_LOGGER = 'loccsmith'
TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record, for log collectors."""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "time": self.formatTime(record, DATE_FORMAT),
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry)


def parse_level(level: Union[int, str, None], default: int = logging.INFO) -> int:
    """Map 'debug', 'INFO', 10, ... to a logging level; unknown names give default."""
    if level is None:
        return default
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    return value if isinstance(value, int) else default


def setup_logging(level: Union[int, str] = logging.INFO, format_json: bool = False) -> logging.Logger:
    """
    Configure application-wide logging.

    Args:
        level: Logging level or its name (default: INFO)
        format_json: If True, emit one JSON object per line

    Returns:
        Root logger for the application
    """
    handler = logging.StreamHandler(sys.stderr)
    if format_json:
        handler.setFormatter(JsonLineFormatter())
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT, datefmt=DATE_FORMAT))

    logging.basicConfig(level=parse_level(level), handlers=[handler], force=True)
    return logging.getLogger(ROOT_LOGGER)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger for a specific module.

    Args:
        name: Module name (e.g., 'loccsmith.core.protocol')

    Returns:
        Logger instance for the module

    Example:
        logger = get_logger('loccsmith.core.protocol')
        logger.info("Simulated 36 branches")
    """
    return logging.getLogger(name)


def log_startup(command: str = "", settings: Optional[Dict[str, Any]] = None) -> None:
    """Log the start of a command-line run and, at DEBUG, the active settings."""
    logger = logging.getLogger(ROOT_LOGGER)
    logger.info("Loccsmith %s starting", command or "run")
    if settings:
        logger.debug("Settings: %s", ", ".join(f"{k}={v}" for k, v in sorted(settings.items())))


def log_shutdown(exit_code: int = 0) -> None:
    logging.getLogger(ROOT_LOGGER).info("Loccsmith finished with exit code %d", exit_code)
