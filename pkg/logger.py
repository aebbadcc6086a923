#!/usr/bin/env python3
"""
Structured logging for solver and harness code.

Console lines go to stderr so stdout stays free for CSV and JSON output.
Setting ``logging.file`` adds a rotating JSON-lines file.
"""
import json
import logging
import logging.handlers
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

_CONSOLE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


class JSONFormatter(logging.Formatter):
    """One JSON object per record, structured fields merged in."""

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            'timestamp': time.time(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'line': record.lineno,
        }
        if record.exc_info:
            log_data['exception'] = self.formatException(record.exc_info)
        log_data.update(getattr(record, 'extra_fields', None) or {})
        return json.dumps(log_data, default=str)


class ConsoleFormatter(logging.Formatter):
    """Human-readable lines with structured fields appended as key=value."""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        extra = getattr(record, 'extra_fields', None)
        if extra:
            line += ' ' + ' '.join(f"{k}={v}" for k, v in extra.items())
        return line


class StructuredLogger:
    """Logger taking structured fields as keyword arguments."""

    def __init__(self, name: str, config: Dict[str, Any]):
        """
        Args:
            name: Logger name
            config: Full configuration dict (only the 'logging' section is read)
        """
        self.logger = logging.getLogger(name)
        self.config = config
        self._setup_logger()

    def _setup_logger(self):
        section = self.config.get('logging', {}) or {}
        level = getattr(logging, str(section.get('level', 'INFO')).upper(), logging.INFO)
        self.logger.setLevel(level)
        self.logger.propagate = False
        self.logger.handlers.clear()

        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(ConsoleFormatter(_CONSOLE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
        self.logger.addHandler(console)

        if section.get('file'):
            self.logger.addHandler(self._file_handler(section))

        for handler in self.logger.handlers:
            handler.setLevel(level)

    @staticmethod
    def _file_handler(section: Dict[str, Any]) -> logging.Handler:
        path = Path(section['file'])
        path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.handlers.RotatingFileHandler(
            path,
            maxBytes=int(section.get('max_size_mb', 10) * 1024 * 1024),
            backupCount=section.get('backup_count', 3),
        )
        if section.get('structured', True):
            handler.setFormatter(JSONFormatter())
        else:
            handler.setFormatter(ConsoleFormatter(_CONSOLE_FORMAT))
        return handler

    def debug(self, message: str, **extra):
        self._log(logging.DEBUG, message, extra)

    def info(self, message: str, **extra):
        self._log(logging.INFO, message, extra)

    def warning(self, message: str, **extra):
        self._log(logging.WARNING, message, extra)

    def error(self, message: str, **extra):
        self._log(logging.ERROR, message, extra)

    def exception(self, message: str, **extra):
        """Log at ERROR with the current traceback."""
        self._log(logging.ERROR, message, extra, exc_info=True)

    def _log(self, level: int, message: str, extra: Dict[str, Any], exc_info: bool = False):
        if not self.logger.isEnabledFor(level):
            return
        self.logger.log(level, message, exc_info=exc_info,
                        extra={'extra_fields': extra} if extra else None, stacklevel=3)


_logger: Optional[StructuredLogger] = None


def get_logger(name: str = 'deploy', config: Optional[Dict[str, Any]] = None) -> StructuredLogger:
    """Process-wide logger.

    The first call creates it; a later call that passes ``config``
    reconfigures the handlers in place.
    """
    global _logger
    if _logger is None:
        _logger = StructuredLogger(name, config or {})
    elif config is not None:
        _logger.config = config
        _logger._setup_logger()
    return _logger
