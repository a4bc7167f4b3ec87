"""Util module to handle logs."""

import logging

# Per-row and per-diagonalization chatter.
HOT_LOOP_FUNCTIONS = ("_sweep_row", "eigh", "evaluate_cell")


class LogFilter(logging.Filter):
    """
    Custom Log Filter.

    Ignore DEBUG records emitted from hot-loop functions.
    """

    # pylint: disable = W0221
    def filter(self, record):
        if record.levelno <= logging.DEBUG and record.funcName in HOT_LOOP_FUNCTIONS:
            return False
        return True
