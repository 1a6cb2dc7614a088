"""
Main entry point for the ReachTAMP toolkit.
Handles initialization before handing over to the CLI.
"""
import sys
import logging

from reachtamp.cli.interface import app as cli_app
from reachtamp.config import validate_config
from reachtamp.utils.exceptions import ConfigurationError
from reachtamp.utils.logging_config import setup_logging, get_logger


def silence_console_loggers():
    """Keep log records in the log file; the console belongs to rich."""
    setup_logging()

    for logger_name in logging.root.manager.loggerDict:
        named = logging.getLogger(logger_name)
        for handler in named.handlers[:]:
            if isinstance(handler, logging.StreamHandler) and handler.stream in (sys.stdout, sys.stderr):
                named.removeHandler(handler)


silence_console_loggers()
logger = get_logger(__name__)


def main():
    """
    Main entry point of the application.
    """
    try:
        logger.info("Validating configuration...")
        validate_config()
        cli_app()
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(1)
    except KeyboardInterrupt:
        logger.info("Application terminated by user")
        sys.exit(0)


if __name__ == "__main__":
    main()
