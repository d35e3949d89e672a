"""
Logging setup for the comarr command line
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbosity: int = 0) -> logging.Logger:
    """
    Install one stderr handler on the package logger

    Args:
        verbosity: -1 quiet (WARNING), 0 normal (INFO), 1+ verbose (DEBUG)

    Returns:
        The configured "comarr" logger
    """
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity == 0:
        level = logging.INFO
    else:
        level = logging.DEBUG

    root = logging.getLogger("comarr")
    root.setLevel(level)

    if not any(getattr(h, "_comarr", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._comarr = True
        root.addHandler(handler)
    root.propagate = False

    return root
