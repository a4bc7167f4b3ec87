"""Utility to export toolkit results to CSV and JSON."""

import csv
import io
import json
import logging
import math
from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np

logger = logging.getLogger(__name__)

PHASE_DIAGRAM_HEADER = (
    "T",
    "B",
    "U",
    "M",
    "chi",
    "energy_margin",
    "chi_margin",
    "energy_verdict",
    "chi_verdict",
)
CORRELATION_HEADER = ("r", "C")
_NON_FINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _float_text(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def to_jsonable(obj: Any) -> Any:
    """
    Convert records, enums and numpy values to JSON-serializable data.

    Objects with a ``to_record`` method are serialized through it; non-finite
    floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.

    Parameters
    ----------
    obj: Any
        Value to convert.

    Returns
    -------
    Any
        Plain dicts, lists, strings, numbers, booleans and None.
    """
    if hasattr(obj, "to_record"):
        return to_jsonable(obj.to_record())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else _float_text(value)
    return obj


def to_json(payload: Any) -> str:
    """Serialize ``payload`` as indented JSON text ending with a newline."""
    return json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False) + "\n"


def restore_floats(obj: Any) -> Any:
    """Inverse of the non-finite float encoding of :func:`to_jsonable`."""
    if isinstance(obj, dict):
        return {key: restore_floats(value) for key, value in obj.items()}
    if isinstance(obj, list):
        return [restore_floats(value) for value in obj]
    if isinstance(obj, str) and obj in _NON_FINITE:
        return _NON_FINITE[obj]
    return obj


def load_json(text: str) -> Any:
    """Parse JSON written by :func:`to_json`."""
    return restore_floats(json.loads(text))


def phase_diagram_csv(
    diagram, temperature_out: Optional[Callable[[float], float]] = None
) -> str:
    """
    Render a phase diagram as CSV, B-major then T.

    Parameters
    ----------
    diagram: PhaseDiagram
        Sweep result.
    temperature_out: Optional[Callable[[float], float]]
        Converts the temperature column for output (physical units).

    Returns
    -------
    str
        CSV text with the fixed header.
    """
    convert = temperature_out or (lambda t: t)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PHASE_DIAGRAM_HEADER)
    for cell in diagram.rows():
        point = cell.point
        writer.writerow(
            (
                _float_text(convert(point.temperature)),
                _float_text(point.field),
                _float_text(point.u),
                _float_text(point.m),
                _float_text(point.chi),
                _float_text(cell.energy.margin),
                _float_text(cell.susceptibility.margin),
                cell.energy.verdict.value,
                cell.susceptibility.verdict.value,
            )
        )
    logger.debug("Rendered %d phase-diagram rows", diagram.shape[0] * diagram.shape[1])
    return buffer.getvalue()


def correlation_csv(series) -> str:
    """Render a correlation series as ``r,C`` CSV."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CORRELATION_HEADER)
    for r, value in zip(series.separations, series.values):
        writer.writerow((r, _float_text(value)))
    return buffer.getvalue()


def read_csv_rows(text: str) -> Dict[str, list]:
    """Columns of a CSV text keyed by header name."""
    reader = csv.DictReader(io.StringIO(text))
    columns: Dict[str, list] = {name: [] for name in reader.fieldnames or ()}
    for row in reader:
        for name, value in row.items():
            columns[name].append(value)
    return columns
