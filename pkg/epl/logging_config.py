from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
import os
from typing import Optional


_DEFAULT_MAX_BYTES = 5 * 1024 * 1024
_DEFAULT_BACKUP_COUNT = 5
ENV_LOG_PATH = "EPL_LOG_PATH"


def file_logging_requested() -> bool:
    return bool(os.environ.get(ENV_LOG_PATH))


def get_logger(
    name: str,
    log_path: Optional[str] = None,
    level: int = logging.INFO,
    max_bytes: int = _DEFAULT_MAX_BYTES,
    backup_count: int = _DEFAULT_BACKUP_COUNT,
) -> logging.Logger:
    """Logger with a rotating file handler; one handler per resolved path."""
    logger = logging.getLogger(name)
    logger.setLevel(level)

    resolved_path = log_path or os.environ.get(ENV_LOG_PATH) or "epl.log"
    resolved_path = os.path.abspath(resolved_path)

    for handler in logger.handlers:
        if isinstance(handler, RotatingFileHandler) and os.path.normcase(
            getattr(handler, "baseFilename", "")
        ) == os.path.normcase(resolved_path):
            return logger

    os.makedirs(os.path.dirname(resolved_path), exist_ok=True)
    handler = RotatingFileHandler(
        resolved_path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8"
    )
    handler.setFormatter(logging.Formatter(
        fmt="%(asctime)s %(levelname)s %(name)s %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    ))
    logger.addHandler(handler)
    return logger
