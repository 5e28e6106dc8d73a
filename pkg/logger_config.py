"""
Logging module for unified logging configuration.

This module sets up a unified logging configuration that can be used across
the apps of the project. It defines a logger that logs messages to the
console and, when enabled in the settings, to a file. The file name and log
levels can be customized.

Functions:
    get_logger: Sets up and returns a logger instance.

Example usage:
    logger = get_logger(__name__)
    logger.info("Solved %s in %d iterations", name, iterations)
"""

import logging
import sys
from typing import Optional

from tempered import settings


def get_logger(logger_name: str, log_file: Optional[str] = None,
               log_level_console: Optional[int] = None,
               log_level_file: int = logging.INFO,
               file_write: Optional[bool] = None) -> logging.Logger:
    """
    Sets up and returns a logger instance.

    This function creates a logger that outputs log messages to stderr and,
    optionally, to a log file. Handlers are attached only the first time a
    given logger name is requested, so modules can call it at import time.

    Parameters:
        logger_name (str): The name of the logger.
        log_file (str): The file where log messages will be written.
            Defaults to ``settings.LOG_FILE``.
        log_level_console (int): Console level. Defaults to ``settings.LOG_LEVEL``.
        log_level_file (int): File level. Default is logging.INFO.
        file_write (bool): Whether to write to the file. Defaults to
            ``settings.LOG_TO_FILE``.

    Returns:
        logging.Logger: A configured logger instance.
    """
    logger = logging.getLogger(logger_name)
    if logger.handlers:
        return logger

    if log_level_console is None:
        log_level_console = logging.getLevelName(settings.LOG_LEVEL)
        if not isinstance(log_level_console, int):
            log_level_console = logging.WARNING
    if file_write is None:
        file_write = settings.LOG_TO_FILE

    levels = [log_level_console]
    if file_write:
        levels.append(log_level_file)
    logger.setLevel(min(levels))
    logger.propagate = False

    formatter = logging.Formatter('%(asctime)s - %(module)s (%(name)s) - '
                                  '%(levelname)s - %(message)s', '%Y-%m-%d %H:%M:%S')

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level_console)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if file_write:
        file_handler = logging.FileHandler(log_file or settings.LOG_FILE, encoding="utf-8")
        file_handler.setLevel(log_level_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger
