"""Utility module to manage meta info."""

import platform
import sys

import numpy
import scipy
from rich.console import Console

from . import __copyright__, __license__, __version__

APP_VERSION = f"Thermal Entanglement Witness Toolkit {__version__}"
DEVICE_MODEL = f"{platform.python_implementation()} {platform.python_version()}"
SYSTEM_VERSION = f"{platform.system()} {platform.release()}"
NUMERICS_VERSION = f"numpy {numpy.__version__}, scipy {scipy.__version__}"


def print_meta(logger):
    """Prints meta-data of the toolkit."""
    console = Console(file=sys.stderr)
    console.log(f"[bold]{APP_VERSION}[/bold],\n[i]{__copyright__}[/i]")
    console.log(f"Licensed under the terms of the {__license__}", end="\n\n")
    logger.info("Python: %s - %s", DEVICE_MODEL, APP_VERSION)
    logger.info("System: %s", SYSTEM_VERSION)
    logger.info("Numerics: %s", NUMERICS_VERSION)
