"""Input validation utilities for configuration and user inputs."""

import math
from typing import Tuple, Union

import numpy as np

from utils.errors import ConfigError

K_B_MEV_PER_K = 8.617333e-2
UNIT_SYSTEMS = ("natural", "physical")
MAX_AXIS_POINTS = 100_000


def parse_axis(text: str) -> Tuple[float, ...]:
    """
    Parse a ``lo:hi:n`` grid specification.

    Parameters
    ----------
    text : str
        ``lo:hi:n`` with ``lo < hi`` and ``n >= 2`` points, ``lo:lo:1`` or a
        single number for a one-point axis.

    Returns
    -------
    Tuple[float, ...]
        Evenly spaced axis values.

    Raises
    ------
    ConfigError
        If the text is malformed.

    Examples
    --------
    >>> parse_axis("0:1:3")
    (0.0, 0.5, 1.0)

    >>> parse_axis("2.5")
    (2.5,)
    """
    if not isinstance(text, str):
        raise ConfigError(f"axis must be a 'lo:hi:n' string, got {text!r}")
    parts = text.strip().split(":")
    try:
        if len(parts) == 1:
            return (_finite(float(parts[0]), "axis value"),)
        if len(parts) != 3:
            raise ValueError(text)
        lo, hi = _finite(float(parts[0]), "axis start"), _finite(float(parts[1]), "axis end")
        count = int(parts[2])
    except ValueError as e:
        raise ConfigError(f"Invalid axis {text!r}, expected lo:hi:n") from e
    if count == 1 and lo == hi:
        return (lo,)
    if count < 2 or count > MAX_AXIS_POINTS:
        raise ConfigError(f"axis {text!r} needs 2..{MAX_AXIS_POINTS} points")
    if not lo < hi:
        raise ConfigError(f"axis {text!r} needs lo < hi")
    return tuple(float(v) for v in np.linspace(lo, hi, count))


def _finite(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return value


def validate_positive(value: Union[str, int, float], name: str) -> float:
    """
    Validate a strictly positive finite number.

    Raises
    ------
    ConfigError
        If value is not a positive finite number.
    """
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a number, got {value!r}") from e
    if not number > 0 or not math.isfinite(number):
        raise ConfigError(f"{name} must be positive and finite, got {value!r}")
    return number


def validate_sites(value: Union[str, int], minimum: int = 2, maximum: int = 12) -> int:
    """
    Validate a site count.

    Raises
    ------
    ConfigError
        If value is not an integer in ``minimum..maximum``.
    """
    try:
        sites = int(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"sites must be an integer, got {value!r}") from e
    if isinstance(value, float) and value != sites:
        raise ConfigError(f"sites must be an integer, got {value!r}")
    if not minimum <= sites <= maximum:
        raise ConfigError(f"sites must be in {minimum}..{maximum}, got {sites}")
    return sites


def validate_unit_system(value: str) -> str:
    """
    Validate the unit system name.

    Raises
    ------
    ConfigError
        If value is not ``natural`` or ``physical``.
    """
    units = str(value).strip().lower()
    if units not in UNIT_SYSTEMS:
        raise ConfigError(f"units must be one of {', '.join(UNIT_SYSTEMS)}, got {value!r}")
    return units


def kelvin_to_energy(temperature_k: float) -> float:
    """Convert a temperature in K to meV."""
    return temperature_k * K_B_MEV_PER_K


def energy_to_kelvin(energy_mev: float) -> float:
    """Convert an energy in meV to K."""
    return energy_mev / K_B_MEV_PER_K
