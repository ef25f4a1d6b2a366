import logging
import os
import warnings

from rich.console import Console
from rich.logging import RichHandler


_CONSOLE = Console(stderr=True)
_NAME = "demodkit"


def setup(level=None):
    """
    Sends `demodkit` logs and Python warnings through a rich handler.

    The level defaults to the `DEMODKIT_LOG_LEVEL` environment variable, or `WARNING`.
    Calling it again only changes the level.

    ##### Examples

    ```python
    >>> setup("DEBUG")
    >>> logger().level == logging.DEBUG
    True
    >>> setup("WARNING")

    ```
    """
    if level is None:
        level = os.environ.get("DEMODKIT_LOG_LEVEL", "WARNING")

    level = level.upper() if isinstance(level, str) else level
    log = logging.getLogger(_NAME)
    log.setLevel(level)

    if not any(isinstance(h, RichHandler) for h in log.handlers):
        handler = RichHandler(rich_tracebacks=True, console=_CONSOLE, show_path=False)
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        log.addHandler(handler)
        log.propagate = False

    logging.captureWarnings(True)
    warnings.filterwarnings("default", category=RuntimeWarning, module="demodkit")


def logger() -> logging.Logger:
    return logging.getLogger(_NAME)


def console() -> Console:
    return _CONSOLE
