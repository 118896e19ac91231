"""
Application Logging Configuration
Provides centralized logging for all solver modules.
"""
import logging
import os
from datetime import datetime


def setup_logger(name, log_dir=None):
    """
    Setup a logger with file and console handlers.
    
    Args:
        name: Logger name (typically __name__ from calling module)
        log_dir: Directory to store log files (defaults to Settings.LOG_DIR)
        
    Returns:
        logging.Logger: Configured logger instance
    """
    # Imported here so config modules can themselves log
    from config.settings import Settings

    log_dir = log_dir or Settings.LOG_DIR

    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    
    # Avoid adding handlers multiple times
    if logger.handlers:
        return logger
    
    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    simple_formatter = logging.Formatter('%(levelname)s - %(message)s')
    
    # File handler - detailed logging, skipped on read-only checkouts
    try:
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f"hypsolve_{datetime.now().strftime('%Y%m%d')}.log")
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        logger.addHandler(file_handler)
    except OSError:
        pass
    
    # Console handler on stderr so JSON on stdout stays clean
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, Settings.CONSOLE_LOG_LEVEL, logging.WARNING))
    console_handler.setFormatter(simple_formatter)
    logger.addHandler(console_handler)
    logger.propagate = False
    
    return logger


def set_console_level(level):
    """
    Change the console verbosity of every solver logger.

    Args:
        level: logging level name or number
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)
    for logger in list(logging.Logger.manager.loggerDict.values()):
        if not isinstance(logger, logging.Logger):
            continue
        for handler in logger.handlers:
            if type(handler) is logging.StreamHandler:
                handler.setLevel(level)
