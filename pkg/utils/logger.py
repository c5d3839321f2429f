"""
Logging utilities for the metric dimension solver suite.

Console output goes to stderr so that command output on stdout stays
machine-readable; file output rotates under ``logs/``.
"""
import configparser
import functools
import json
import logging
import logging.handlers
import os
import sys
import threading
import time
import traceback
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
VALID_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

_STANDARD_RECORD_KEYS = frozenset({
    'name', 'msg', 'args', 'levelname', 'levelno', 'pathname', 'filename',
    'module', 'exc_info', 'exc_text', 'stack_info', 'lineno', 'funcName',
    'created', 'msecs', 'relativeCreated', 'thread', 'threadName',
    'processName', 'process', 'message', 'taskName',
})


def _config_dir() -> Path:
    override = os.getenv('MDSOLVE_CONFIG_DIR')
    if override:
        return Path(override)
    return Path(__file__).resolve().parent.parent / 'config'


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ('1', 'true', 'yes', 'on')


class ColoredFormatter(logging.Formatter):
    """Colored formatter for console output."""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
        'RESET': '\033[0m'
    }

    def format(self, record):
        color = self.COLORS.get(record.levelname, self.COLORS['RESET'])
        original = record.levelname
        record.levelname = f"{color}{original}{self.COLORS['RESET']}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record):
        log_obj = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
            'message': record.getMessage(),
            'thread_name': record.threadName,
            'process_id': record.process
        }

        if record.exc_info and record.exc_info[0] is not None:
            log_obj['exception'] = {
                'type': record.exc_info[0].__name__,
                'message': str(record.exc_info[1]),
                'traceback': traceback.format_exception(*record.exc_info)
            }

        # extra= fields (root vertex, budget, node id, ...)
        for key, value in record.__dict__.items():
            if key not in _STANDARD_RECORD_KEYS:
                log_obj[key] = value

        return json.dumps(log_obj, default=str, ensure_ascii=False)


class EnhancedLogger:
    """Registry of configured loggers sharing one configuration."""

    def __init__(self):
        self._loggers: Dict[str, logging.Logger] = {}
        self._lock = threading.Lock()
        self._config = self._load_default_config()

    def _load_default_config(self) -> Dict[str, Any]:
        """Read [DEFAULT] logging keys from config.ini, then apply environment overrides."""
        defaults = {
            'log_level': 'INFO',
            'log_format': 'standard',
            'log_to_file': 'true',
            'log_to_console': 'true',
        }
        config_path = _config_dir() / 'config.ini'
        if config_path.exists():
            parser = configparser.ConfigParser(interpolation=None)
            try:
                parser.read(config_path, encoding='utf-8')
                for key in defaults:
                    if key in parser.defaults():
                        defaults[key] = parser.defaults()[key]
            except configparser.Error as e:
                print(f"Warning: Could not read logging settings from {config_path}: {e}", file=sys.stderr)

        level = os.getenv('LOG_LEVEL', defaults['log_level']).upper()
        if level not in VALID_LEVELS:
            level = 'INFO'

        return {
            'log_level': level,
            'log_format': os.getenv('LOG_FORMAT', defaults['log_format']).lower(),
            'max_file_size': int(os.getenv('LOG_MAX_FILE_SIZE', '10485760')),
            'backup_count': int(os.getenv('LOG_BACKUP_COUNT', '5')),
            'log_to_console': _env_flag('LOG_TO_CONSOLE', defaults['log_to_console'].lower() == 'true'),
            'log_to_file': _env_flag('LOG_TO_FILE', defaults['log_to_file'].lower() == 'true'),
            'logs_base_dir': os.getenv('LOGS_BASE_DIR', 'logs'),
        }

    def _formatter(self, custom_format: Optional[str] = None) -> logging.Formatter:
        if custom_format:
            return logging.Formatter(custom_format)
        format_type = self._config['log_format']
        if format_type == 'json':
            return JSONFormatter()
        if format_type == 'colored':
            return ColoredFormatter(LOG_FORMAT)
        return logging.Formatter(LOG_FORMAT)

    def setup_logger(
        self,
        name: str,
        log_level: Optional[str] = None,
        log_to_file: Optional[bool] = None,
        log_to_console: Optional[bool] = None,
        custom_format: Optional[str] = None
    ) -> logging.Logger:
        """
        Set up a logger, or return the cached one.

        Args:
            name: Logger name
            log_level: Level override; the configured level otherwise
            log_to_file: Whether to write to the rotating log file
            log_to_console: Whether to write to stderr
            custom_format: Custom format string

        Returns:
            Configured logger instance
        """
        with self._lock:
            if name in self._loggers:
                return self._loggers[name]

            logger = logging.getLogger(name)
            logger.handlers.clear()
            logger.setLevel(getattr(logging, (log_level or self._config['log_level']).upper()))

            formatter = self._formatter(custom_format)

            to_console = log_to_console if log_to_console is not None else self._config['log_to_console']
            if to_console:
                console_handler = logging.StreamHandler(sys.stderr)
                console_handler.setFormatter(formatter)
                logger.addHandler(console_handler)

            to_file = log_to_file if log_to_file is not None else self._config['log_to_file']
            if to_file:
                self._add_file_handler(logger, formatter)

            logger.propagate = False
            self._loggers[name] = logger
            return logger

    def _add_file_handler(self, logger: logging.Logger, formatter: logging.Formatter):
        logs_dir = Path(self._config['logs_base_dir'])
        try:
            logs_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                logs_dir / "mdsolve.log",
                maxBytes=self._config['max_file_size'],
                backupCount=self._config['backup_count'],
                encoding='utf-8'
            )
        except OSError as e:
            print(f"Warning: File logging disabled: {e}", file=sys.stderr)
            return
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    def get_logger(self, name: str) -> logging.Logger:
        if name in self._loggers:
            return self._loggers[name]
        return self.setup_logger(name)

    def configure_from_dict(self, config: Dict[str, Any]):
        """Merge configuration and re-apply the level to existing loggers."""
        self._config.update(config)
        level = getattr(logging, self._config.get('log_level', 'INFO').upper())
        for logger in self._loggers.values():
            logger.setLevel(level)

    def reload_config_from_ini(self) -> Dict[str, Any]:
        self.configure_from_dict(self._load_default_config())
        return self._config

    @property
    def config(self) -> Dict[str, Any]:
        return dict(self._config)

    @contextmanager
    def log_context(self, logger_name: str, **context):
        """Yield an adapter that prefixes every message with ``[k=v, ...]``."""
        logger = self.get_logger(logger_name)

        class ContextAdapter(logging.LoggerAdapter):
            def process(self, msg, kwargs):
                prefix = ', '.join(f'{k}={v}' for k, v in self.extra.items())
                return f"[{prefix}] {msg}", kwargs

        yield ContextAdapter(logger, context)

    def log_performance(self, logger_name: str, operation: str, duration: float, **extra):
        self.get_logger(logger_name).info(
            f"Performance: {operation} completed in {duration:.3f}s",
            extra={'operation': operation, 'duration': duration, **extra}
        )

    def log_exception(self, logger_name: str, message: str = "Exception occurred", **extra):
        self.get_logger(logger_name).exception(message, extra=extra)

    def cleanup(self):
        """Close every handler and forget all loggers."""
        for logger in self._loggers.values():
            for handler in logger.handlers[:]:
                handler.close()
                logger.removeHandler(handler)
        self._loggers.clear()


_enhanced_logger = EnhancedLogger()


def setup_logger(
    name: str,
    log_level: Optional[str] = None,
    log_to_file: Optional[bool] = None,
    log_to_console: Optional[bool] = None,
    custom_format: Optional[str] = None
) -> logging.Logger:
    """Set up a logger through the shared registry."""
    return _enhanced_logger.setup_logger(
        name=name,
        log_level=log_level,
        log_to_file=log_to_file,
        log_to_console=log_to_console,
        custom_format=custom_format
    )


def get_logger(name: str) -> logging.Logger:
    return _enhanced_logger.get_logger(name)


def configure_logging(config: Dict[str, Any]):
    _enhanced_logger.configure_from_dict(config)


def reload_config_from_ini() -> Dict[str, Any]:
    return _enhanced_logger.reload_config_from_ini()


def set_log_level(level: str) -> str:
    """Set the level for all loggers; returns the normalised level name."""
    level = level.upper()
    if level not in VALID_LEVELS:
        raise ValueError(f"Invalid log level: {level}")
    _enhanced_logger.configure_from_dict({'log_level': level})
    return level


def get_current_log_level() -> str:
    return _enhanced_logger.config.get('log_level', 'INFO')


def initialize_test_logging() -> Dict[str, Any]:
    """Reload logging settings at the start of a behave run."""
    config = reload_config_from_ini()
    logger.info("Test logging initialized")
    logger.info(f"Active log level: {get_current_log_level()}")
    return config


def log_test_step(step_name: str, **context):
    """Log a test step with context information."""
    message = f"Test Step: {step_name}"
    if context:
        message += " | Context: " + ', '.join(f'{k}={v}' for k, v in context.items())
    test_logger.info(message)


def log_test_result(test_name: str, status: str, **details):
    """Log a test result; failures go out at ERROR."""
    message = f"Test Result: {test_name} - {status.upper()}"
    if details:
        message += " | Details: " + ', '.join(f'{k}={v}' for k, v in details.items())

    if status.upper() in ('PASSED', 'SUCCESS'):
        test_logger.info(message)
    elif status.upper() in ('FAILED', 'ERROR'):
        test_logger.error(message)
    else:
        test_logger.warning(message)


@contextmanager
def log_context(logger_name: str, **context):
    with _enhanced_logger.log_context(logger_name, **context) as adapter:
        yield adapter


def log_performance(logger_name: str, operation: str, duration: float, **extra):
    _enhanced_logger.log_performance(logger_name, operation, duration, **extra)


def log_exception(logger_name: str, message: str = "Exception occurred", **extra):
    _enhanced_logger.log_exception(logger_name, message, **extra)


def log_execution_time(logger_name: str, operation_name: Optional[str] = None):
    """Decorator logging wall-clock time of the wrapped call."""
    def decorator(func):
        op_name = operation_name or f"{func.__module__}.{func.__name__}"

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = time.perf_counter() - start_time
                get_logger(logger_name).error(f"Operation {op_name} failed after {duration:.3f}s: {e}")
                raise
            log_performance(logger_name, op_name, time.perf_counter() - start_time)
            return result
        return wrapper
    return decorator


logger = setup_logger("mdsolve")
graph_logger = setup_logger("graph")
decomp_logger = setup_logger("decomp")
solver_logger = setup_logger("solver")
cli_logger = setup_logger("cli")
test_logger = setup_logger("test_execution")
performance_logger = setup_logger("performance")


__all__ = [
    'setup_logger', 'get_logger', 'configure_logging', 'reload_config_from_ini',
    'set_log_level', 'get_current_log_level',
    'initialize_test_logging', 'log_test_step', 'log_test_result',
    'log_context', 'log_performance', 'log_exception', 'log_execution_time',
    'logger', 'graph_logger', 'decomp_logger', 'solver_logger', 'cli_logger',
    'test_logger', 'performance_logger',
    'EnhancedLogger', 'ColoredFormatter', 'JSONFormatter'
]
