import contextlib
import logging
import os
import typing
from pathlib import Path

formatter = logging.Formatter("%(asctime)s :: %(levelname)s :: %(funcName)s :: %(lineno)d :: %(message)s")

RUN_LOG_NAME = "panofourier.log"


def log_directory() -> Path:
    """Directory of the package-wide log files, PANOFOURIER_LOG_DIR or the working directory."""
    return Path(os.environ.get("PANOFOURIER_LOG_DIR", "."))


def setup_logger(name: str, log_file: str, level: int = logging.DEBUG) -> logging.Logger:
    """Attaches a file handler writing ``log_file`` to the logger ``name``.

    Calling it twice for the same file keeps a single handler.
    """
    logger = logging.getLogger(name)
    path = (log_directory() / log_file).resolve()
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and Path(handler.baseFilename) == path:
            return logger

    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path)
    handler.setFormatter(formatter)
    logger.setLevel(level)
    logger.addHandler(handler)
    return logger


@contextlib.contextmanager
def run_log(
    out_dir: typing.Union[str, Path],
    names: typing.Sequence[str] = ("general_logger", "training_logger"),
    level: int = logging.INFO,
):
    """Copies the records of the ``names`` loggers into ``<out_dir>/panofourier.log`` while active."""
    path = Path(out_dir) / RUN_LOG_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path)
    handler.setFormatter(formatter)
    handler.setLevel(level)
    loggers = [logging.getLogger(name) for name in names]
    for logger in loggers:
        logger.addHandler(handler)
    try:
        yield path
    finally:
        for logger in loggers:
            logger.removeHandler(handler)
        handler.close()
