import logging
import os
import sys
from pathlib import Path
from typing import Optional


def setup_logger(
    name: str = "cpg2kit",
    level: Optional[int] = None,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
) -> logging.Logger:
    """Set up the package logger once, on stderr, with optional file logging."""
    logger = logging.getLogger(name)
    if logger.hasHandlers():
        return logger  # Already configured

    if level is None:
        level_name = os.getenv("CPG2KIT_LOG_LEVEL", "WARNING").upper()
        level = getattr(logging, level_name, logging.WARNING)

    logger.setLevel(level)
    logger.propagate = False

    if format_string is None:
        format_string = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    formatter = logging.Formatter(format_string)

    # stdout carries CLI reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def set_level(level: int) -> None:
    """Change the level of the global logger and its handlers."""
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)


# Global logger instance
logger = setup_logger()
