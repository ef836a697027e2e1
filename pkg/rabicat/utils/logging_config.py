"""
Logging for the ``rabicat`` package.

Modules obtain their logger with ``get_logger(__name__)``; the command line
calls ``setup_logging`` once with ``--log-level`` and ``--log-file``.
"""

import logging
import sys
from pathlib import Path

PACKAGE_LOGGER = "rabicat"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(
    level: str | int = "INFO", log_file: Path | None = None, console_output: bool = True
) -> logging.Logger:
    """
    Install handlers on the package logger.

    Calling it again replaces the previous handlers, so repeated CLI
    invocations in one interpreter (tests) do not duplicate lines.

    Parameters
    ----------
    level : str or int, optional
        Level name (``DEBUG`` ... ``CRITICAL``) or numeric level. Unknown
        names fall back to INFO.
    log_file : Path, optional
        Additional log file; parent directories are created.
    console_output : bool, optional
        Log to stdout.

    Returns
    -------
    logging.Logger
        The configured ``rabicat`` logger.
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    package = logging.getLogger(PACKAGE_LOGGER)
    package.setLevel(level)
    package.propagate = False
    for handler in list(package.handlers):
        package.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers: list[logging.Handler] = []
    if console_output:
        handlers.append(logging.StreamHandler(sys.stdout))
    if log_file is not None:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        package.addHandler(handler)

    # numpy/scipy RuntimeWarnings (overflow in kernels, ill-conditioned fits)
    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.handlers = list(package.handlers)
    warnings_logger.propagate = False
    return package


def get_logger(name: str) -> logging.Logger:
    """
    Logger under the ``rabicat`` hierarchy.

    ``__main__`` and other names outside the package are re-rooted so that
    ``python -m rabicat.cli`` logs through the same handlers.
    """
    if name != PACKAGE_LOGGER and not name.startswith(PACKAGE_LOGGER + "."):
        name = f"{PACKAGE_LOGGER}.{name.rsplit('.', 1)[-1]}"
    return logging.getLogger(name)
