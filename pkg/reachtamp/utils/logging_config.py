import logging
import warnings
from datetime import datetime
from logging.handlers import RotatingFileHandler

from reachtamp.config import LOGS_DIR, LOG_LEVEL


def setup_logging():
    """
    Configure logging for the toolkit.
    Sets up file logging only (console output is rendered by rich in the CLI).
    """
    warnings.filterwarnings('ignore', category=DeprecationWarning, module='pydantic')

    LOGS_DIR.mkdir(parents=True, exist_ok=True)

    # Generate log filename with timestamp
    current_date = datetime.now().strftime('%Y%m%d')
    log_filepath = LOGS_DIR / f'reachtamp_{current_date}.log'

    formatter = logging.Formatter('%(levelname)s - %(message)s')

    root_logger = logging.getLogger()
    root_logger.setLevel(LOG_LEVEL)

    # Clear any existing handlers
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # File handler with rotation
    file_handler = RotatingFileHandler(
        log_filepath,
        maxBytes=10*1024*1024,  # 10MB
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setFormatter(formatter)
    file_handler.setLevel(LOG_LEVEL)
    root_logger.addHandler(file_handler)

    # lark logs grammar construction at DEBUG
    logging.getLogger('lark').setLevel(logging.WARNING)

    logging.getLogger('reachtamp').info(f"Logging initialized. Log file: {log_filepath}")


def get_logger(name):
    """
    Get a logger with the specified name.

    Args:
        name (str): Logger name, typically __name__ of the module

    Returns:
        logging.Logger: Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(LOG_LEVEL)
    return logger
