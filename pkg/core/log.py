import logging
import os
import sys
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from typing import Dict, Optional, Union

LEVEL_ENV = "ORBIFOLD_LOG_LEVEL"

CONSOLE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Logger:
    def __init__(self, name: str, log_dir: Optional[str] = None):
        """
        Initialize logger with name and optional log directory.

        Console output goes to stderr so that reports printed on stdout stay parseable.

        Args:
            name: Logger name
            log_dir: Directory to store log files, None for console only
        """
        self.name = name
        self.log_dir = log_dir
        self.logger = logging.getLogger(name)
        self.logger.setLevel(self._get_level(os.environ.get(LEVEL_ENV, "WARNING")))
        self.logger.propagate = False

        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)

        self.logger.handlers.clear()
        self._setup_handlers()

    def _setup_handlers(self):
        """Setup console and file handlers."""
        self._add_console_handler()
        if self.log_dir:
            log_file = os.path.join(self.log_dir, f"{self.name}.log")
            self._add_file_handler(RotatingFileHandler(
                log_file,
                maxBytes=10*1024*1024,  # 10MB
                backupCount=5
            ))

    def _add_console_handler(self):
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        self.logger.addHandler(console_handler)

    def _add_file_handler(self, handler: logging.Handler):
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(FILE_FORMAT))
        self.logger.addHandler(handler)

    def debug(self, message: str, **kwargs):
        """Log debug message."""
        self._log(logging.DEBUG, message, **kwargs)

    def info(self, message: str, **kwargs):
        """Log info message."""
        self._log(logging.INFO, message, **kwargs)

    def warning(self, message: str, **kwargs):
        """Log warning message."""
        self._log(logging.WARNING, message, **kwargs)

    def error(self, message: str, **kwargs):
        """Log error message."""
        self._log(logging.ERROR, message, **kwargs)

    def _log(self, level: int, message: str, **kwargs):
        """Internal logging method with extra data handling."""
        if not self.logger.isEnabledFor(level):
            return
        if kwargs:
            message = f"{message} - Extra Data: {kwargs}"
        self.logger.log(level, message)

    def set_level(self, level: Union[int, str]):
        """Set logging level."""
        self.logger.setLevel(self._get_level(level))

    def _get_level(self, level: Union[int, str]) -> int:
        """Convert string level to logging level."""
        if isinstance(level, int):
            return level
        return getattr(logging, level.upper())


class DailyLogger(Logger):
    """Logger whose file rotates at midnight."""

    def _setup_handlers(self):
        self._add_console_handler()
        if self.log_dir:
            log_file = os.path.join(self.log_dir, f"{self.name}.log")
            self._add_file_handler(TimedRotatingFileHandler(
                log_file,
                when='midnight',
                interval=1,
                backupCount=30  # Keep 30 days of logs
            ))


_loggers: Dict[str, Logger] = {}


def create_logger(name: str, log_dir: Optional[str] = None, daily: bool = False) -> Logger:
    """
    Return the logger registered under name, creating it on first use.

    Asking again with a different log_dir or rotation rebuilds the handlers.

    Args:
        name: Logger name
        log_dir: Directory to store log files
        daily: If True, creates DailyLogger, otherwise creates standard Logger
    """
    logger_class = DailyLogger if daily else Logger
    current = _loggers.get(name)
    if current is not None and current.log_dir == log_dir and type(current) is logger_class:
        return current
    _loggers[name] = logger_class(name, log_dir)
    return _loggers[name]


def configure(level: Union[int, str], log_dir: Optional[str] = None, daily: bool = False):
    """Rebuild every registered logger with a new level and destination."""
    for name in list(_loggers):
        create_logger(name, log_dir, daily).set_level(level)


"""
from core.log import create_logger

logger = create_logger(__name__)
logger.debug("contracted network", factors=12, entries=480)

# file logging with daily rotation
logger = create_logger("orbifold", log_dir="logs", daily=True)
"""
