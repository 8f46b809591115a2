import logging
import sys
from datetime import datetime

from loguru import logger


class InterceptHandler(logging.Handler):
    def emit(self, record):
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = sys._getframe(6), 6
        while frame and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def _add_stderr_sink(level) -> int:
    return logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level}</level> | <level>{message}</level>",
        level=level,
        colorize=True
    )


def setup_logger():
    if hasattr(setup_logger, '_initialized'):
        return logger
    setup_logger._initialized = True

    from src.core.loader import get_log_path, load_settings
    settings = load_settings()['logging']
    level = settings.get('level', 'INFO')

    logger.remove()

    setup_logger._stderr_sink = _add_stderr_sink(level)

    if settings.get('file', False):
        log_dir = get_log_path()
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"{datetime.now().strftime('%Y-%m-%d')}.log"

        logger.add(
            log_file,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level} | {name} | {message}",
            level=level,
            encoding="utf-8"
        )

    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)

    return logger


def get_logger(name: str):
    setup_logger()
    return logger.bind(name=name)


def set_level(level: str):
    """Re-add the stderr sink at a new level (CLI --log-level); the file sink is left alone."""
    setup_logger()
    logger.remove(setup_logger._stderr_sink)
    setup_logger._stderr_sink = _add_stderr_sink(level)
