import logging
import sys
from logging.handlers import RotatingFileHandler
import os
from typing import Optional

from .config import Config


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None):
    """Configures logging for the library and the CLI"""
    # Drop handlers left over from a previous call
    logger = logging.getLogger()
    if logger.hasHandlers():
        logger.handlers.clear()

    level = (level or Config.LOG_LEVEL).upper()
    log_dir = Config.LOG_DIR if log_dir is None else log_dir

    logger.setLevel(level)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # stdout carries analysis output, so diagnostics go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_dir:
        if not os.path.exists(log_dir):
            os.makedirs(log_dir)

        file_handler = RotatingFileHandler(
            os.path.join(log_dir, 'chopper.log'),
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # Silence library chatter
    logging.getLogger('asyncio').setLevel(logging.WARNING)

    return logger
