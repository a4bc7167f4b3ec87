"""Console and file logging for command-line runs."""

import logging
import logging.config
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from utils.log import LogFilter

LOG_FILE_NAME = "thermowit.log"
FILE_FORMAT = "[%(asctime)s] %(levelname)s - %(name)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_PACKAGE_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG_FILE = _PACKAGE_ROOT / "config" / "logging.yaml"
DEFAULT_LOG_DIR = _PACKAGE_ROOT / "Output" / "logs"


def setup_logging(
    config_file: Optional[str] = None,
    log_level: Optional[str] = None,
    log_dir: Optional[str] = None,
    quiet: bool = False,
) -> None:
    """
    Configure logging from a YAML dictConfig file.

    Parameters
    ----------
    config_file : Optional[str]
        Logging configuration; defaults to ``config/logging.yaml``.
    log_level : Optional[str]
        Console level override (DEBUG, INFO, WARNING, ERROR, CRITICAL).
    log_dir : Optional[str]
        Directory the file handlers write to; created when missing.
    quiet : bool
        Only show errors on the console.
    """
    config_path = Path(config_file) if config_file else DEFAULT_CONFIG_FILE
    level = "ERROR" if quiet else log_level
    directory = Path(log_dir) if log_dir else DEFAULT_LOG_DIR

    if not config_path.exists():
        _setup_default_logging(level, directory)
        return

    try:
        with open(config_path, encoding="utf-8") as f:
            config = yaml.safe_load(f)
        _apply_overrides(config, level, directory)
        logging.config.dictConfig(config)
    except Exception:  # pylint: disable = W0703
        _setup_default_logging(level, directory)
        return

    if level and logging.getLevelName(level.upper()) < logging.INFO:
        logging.getLogger().setLevel(level.upper())
    logging.getLogger(__name__).debug("Logging configured from %s", config_path)


def _apply_overrides(config: Dict[str, Any], level: Optional[str], directory: Path) -> None:
    """Re-root relative log files under ``directory`` and set the console level."""
    directory.mkdir(parents=True, exist_ok=True)
    for handler in config.get("handlers", {}).values():
        filename = handler.get("filename")
        if filename is not None and not os.path.isabs(filename):
            handler["filename"] = str(directory / os.path.basename(filename))
        if level and handler.get("class") == "logging.StreamHandler":
            handler["level"] = level.upper()


def _setup_default_logging(log_level: Optional[str], log_dir: Path) -> None:
    """Fallback: a rich console handler on stderr plus a plain log file."""
    from rich.console import Console
    from rich.logging import RichHandler

    log_dir.mkdir(parents=True, exist_ok=True)

    console_handler = RichHandler(
        console=Console(file=sys.stderr),
        rich_tracebacks=True,
        show_path=False,
    )
    console_handler.setLevel(getattr(logging, log_level.upper()) if log_level else logging.INFO)
    console_handler.addFilter(LogFilter())

    file_handler = logging.FileHandler(log_dir / LOG_FILE_NAME, encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.addHandler(console_handler)
    root_logger.addHandler(file_handler)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Module logger; ``name`` defaults to this module."""
    return logging.getLogger(name or __name__)
