from .logging import LOG_FORMAT, set_debug_mode, setup_logger

__all__ = ["LOG_FORMAT", "set_debug_mode", "setup_logger"]
