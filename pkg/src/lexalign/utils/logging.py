import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_LOGGER_NAMES = set()


def setup_logger(name: str, debug_mode: bool = False) -> logging.Logger:
    """
    Set up a named logger with the lexalign stream format.

    Args:
        name (str): Logger name, usually the class name of the caller
        debug_mode (bool): Log at DEBUG level if True. Defaults to False

    Returns:
        logging.Logger: The configured logger
    """
    logger = logging.getLogger(name)
    _LOGGER_NAMES.add(name)

    # Prevent multiple handlers being added if already set
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        # Emitted here only, not again by the root handler
        logger.propagate = False

    if debug_mode:
        logger.setLevel(logging.DEBUG)
    elif logger.level == logging.NOTSET:
        logger.setLevel(logging.INFO)
    return logger


def set_debug_mode(debug_mode: bool) -> None:
    """Switch every logger created by :func:`setup_logger` between DEBUG and INFO."""
    level = logging.DEBUG if debug_mode else logging.INFO
    for name in _LOGGER_NAMES:
        logging.getLogger(name).setLevel(level)
