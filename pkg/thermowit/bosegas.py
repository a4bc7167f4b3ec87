"""
Free Bose gas in a box: mode energies, separable-configuration energies and
transition temperatures, plus the low-dimension condensate-fraction probe.

Natural units throughout (hbar = k_B = 1).
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.special import bernoulli, factorial
from scipy.stats import linregress

from utils.errors import ClassificationError, ConfigError, NumericalError

logger = logging.getLogger(__name__)

ZETA_DIRECT_TERMS = 20
ZETA_TAIL_ORDER = 12
ROMBERG_RTOL = 1e-8
ROMBERG_MAX_SPLITS = 24
IDENTITY_RTOL = 1e-10

RATE_RESIDUAL_MAX = 0.05
CLASS_BOUNDARY = 0.5
CLASS_GAP = 0.1

_TAIL_BERNOULLI = bernoulli(2 * ZETA_TAIL_ORDER)


def zeta(s: float) -> float:
    """
    Riemann zeta function for real ``s > 1``.

    Direct summation of the first terms plus an Euler-Maclaurin tail.
    """
    s = float(s)
    if not s > 1 or not math.isfinite(s):
        raise ConfigError(f"zeta needs a finite s > 1, got {s!r}")
    n = ZETA_DIRECT_TERMS
    head = float(np.sum(np.arange(1, n, dtype=float) ** -s))
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n**-s
    rising = s
    for k in range(1, ZETA_TAIL_ORDER + 1):
        tail += _TAIL_BERNOULLI[2 * k] / factorial(2 * k) * rising * n ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return head + tail


def mode_energy(k: int, length: float, mass: float) -> float:
    """Box mode energy ``(1/2m) (k pi / L)^2``."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ConfigError(f"mode index must be an integer >= 1, got {k!r}")
    if not length > 0 or not mass > 0:
        raise ConfigError("length and mass must be positive")
    return (int(k) * math.pi / length) ** 2 / (2.0 * mass)


@dataclass(frozen=True)
class BoxGasSpec:
    """Ideal Bose gas of N particles in a d-dimensional box split into M regions."""

    mass: float
    volume: float
    dimension: int
    num_particles: int
    num_regions: int = 1

    def __post_init__(self):
        for name in ("mass", "volume"):
            value = float(getattr(self, name))
            if not value > 0 or not math.isfinite(value):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("dimension", "num_particles", "num_regions"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def length(self) -> float:
        return self.volume ** (1.0 / self.dimension)

    @property
    def density(self) -> float:
        return self.num_particles / self.volume

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def _require_1d(spec: BoxGasSpec) -> None:
    if spec.dimension != 1:
        raise ConfigError(f"closed form is one-dimensional, got d={spec.dimension}")


def condensation_energy(spec: BoxGasSpec) -> float:
    """All N particles in the lowest 1-D box mode."""
    _require_1d(spec)
    return spec.num_particles * mode_energy(1, spec.length, spec.mass)


def min_separable_energy(spec: BoxGasSpec, regions: Optional[int] = None) -> float:
    """
    Lowest energy of a configuration separable across ``regions`` equal parts.

    Each particle sits in the ground mode of a box of length ``L / M``, giving
    ``N (1/2m) (pi M / L)^2``.
    """
    _require_1d(spec)
    regions = spec.num_regions if regions is None else regions
    if isinstance(regions, bool) or int(regions) != regions or regions < 1:
        raise ConfigError(f"number of regions must be an integer >= 1, got {regions!r}")
    return spec.num_particles * mode_energy(1, spec.length / int(regions), spec.mass)


@dataclass(frozen=True)
class TransitionReport:
    """Separability and condensation temperatures of one gas."""

    t_trans: float
    t_crit: float
    t_bec: float
    ratio_crit_over_bec: float

    def __post_init__(self):
        for name in ("t_trans", "t_crit", "t_bec", "ratio_crit_over_bec"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def bec_exists(self) -> bool:
        return self.t_bec > 0

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "TransitionReport":
        return cls(**record)


def _separability_temperature(mass: float, volume: float, d: int, n: float, regions: float) -> float:
    prefactor = 2.0 * math.pi / (mass * volume ** (2.0 / d))
    core = math.pi * n * regions ** (2.0 / d) / (2.0 * zeta(1.0 + d / 2.0))
    return prefactor * core ** (2.0 / (2.0 + d))


def transition_temperatures(spec: BoxGasSpec) -> TransitionReport:
    """
    Separability transition ``T_trans``, its ``M = N`` upper estimate
    ``T_crit`` and the ideal-gas ``T_bec`` (zero for ``d <= 2``).

    Raises
    ------
    NumericalError
        If ``T_crit`` written in density form departs from ``T_trans(M=N)``.
    """
    d = spec.dimension
    t_trans = _separability_temperature(
        spec.mass, spec.volume, d, spec.num_particles, spec.num_regions
    )
    rho = spec.density
    t_crit = (
        2.0 * math.pi / spec.mass * rho ** (2.0 / d)
        * (math.pi / (2.0 * zeta(1.0 + d / 2.0))) ** (2.0 / (2.0 + d))
    )
    t_full = _separability_temperature(
        spec.mass, spec.volume, d, spec.num_particles, spec.num_particles
    )
    if abs(t_crit - t_full) > IDENTITY_RTOL * t_full:
        raise NumericalError(f"T_crit={t_crit!r} disagrees with T_trans(M=N)={t_full!r}")
    if d > 2:
        t_bec = 2.0 * math.pi / spec.mass * (rho / zeta(d / 2.0)) ** (2.0 / d)
        ratio = t_crit / t_bec
    else:
        t_bec, ratio = 0.0, math.inf
    logger.debug("d=%d: T_trans=%.6g T_crit=%.6g T_bec=%.6g", d, t_trans, t_crit, t_bec)
    return TransitionReport(t_trans, t_crit, t_bec, ratio)


def homes_scaling_exponent(d: int) -> float:
    """Exponent of ``T_crit ~ rho^(2/d)``."""
    if not d >= 1:
        raise ConfigError(f"dimension must be >= 1, got {d!r}")
    return 2.0 / d


def romberg(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = ROMBERG_RTOL,
    max_splits: int = ROMBERG_MAX_SPLITS,
) -> float:
    """
    Romberg integration of a vectorized function over ``[a, b]``.

    The trapezoid rule is refined by halving and extrapolated Richardson
    style until the last two diagonal entries agree to ``rtol``.

    Raises
    ------
    NumericalError
        When ``max_splits`` halvings do not reach ``rtol``.
    """
    if not b >= a:
        raise ConfigError(f"integration limits must be increasing, got [{a}, {b}]")
    if int(max_splits) < 1:
        raise ConfigError(f"max_splits must be positive, got {max_splits!r}")
    span = b - a
    if span == 0:
        return 0.0
    total = 0.5 * float(func(np.array([a]))[0] + func(np.array([b]))[0])
    table = [[span * total]]
    intervals = 1
    for split in range(1, max_splits + 1):
        h = span / intervals
        midpoints = a + h * (np.arange(intervals) + 0.5)
        total += float(np.sum(func(midpoints)))
        intervals *= 2
        row = [span * total / intervals]
        for k in range(split):
            factor = 4.0 ** (k + 1)
            row.append((factor * row[k] - table[split - 1][k]) / (factor - 1.0))
        table.append(row)
        estimate, previous = row[-1], table[split - 1][-1]
        if not math.isfinite(estimate):
            raise NumericalError("Romberg integration produced a non-finite value")
        if split >= 3 and abs(estimate - previous) <= rtol * abs(estimate):
            return estimate
    raise NumericalError(
        f"Romberg integration did not converge in {max_splits} splits "
        f"(last change {abs(estimate - previous):.3e})"
    )


def condensate_fraction_integral(d: int, epsilon: float, p_max: float = 10.0) -> float:
    """
    ``int_eps^p_max p^(d-1) / (exp(p^2/2) - 1) dp`` in natural units.

    Integrated in ``u = ln p`` where the small-p spike becomes a smooth
    exponential.
    """
    if not 0 < epsilon < p_max:
        raise ConfigError(f"need 0 < epsilon < p_max, got epsilon={epsilon!r}, p_max={p_max!r}")
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d!r}")

    def integrand(u: np.ndarray) -> np.ndarray:
        p = np.exp(u)
        return p**d / np.expm1(0.5 * p * p)

    return romberg(integrand, math.log(epsilon), math.log(p_max))


class DivergenceClass(Enum):
    """Small-cutoff behaviour of the condensate-fraction integral."""

    CONVERGENT = "convergent"
    POWER = "power"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class DivergenceReport:
    """Cutoff scan of the condensate-fraction integral."""

    dimension: int
    epsilon: float
    p_max: float
    integral: float
    divergence_class: DivergenceClass
    exponent: Optional[float]
    """Divergence exponent ``k`` of ``I ~ eps^k``, set for the power class."""
    fit_quality: float
    """One minus the RMS residual of the log-rate fit."""

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record["divergence_class"] = self.divergence_class.value
        return record


def condensate_fraction_probe(
    d: int, epsilon: float = 1e-3, p_max: float = 10.0, samples: int = 9
) -> DivergenceReport:
    """
    Classify how the condensate-fraction integral behaves as the cutoff goes to 0.

    Cutoffs are sampled log-uniformly on ``[epsilon, 10 epsilon]``. The slice
    integrals between neighbouring cutoffs give the growth rate
    ``g = -dI/d ln(eps)``, and ``ln g`` is fitted against ``ln eps``. Near 0
    the rate scales as ``eps^(d-2)``, so the slope ``k`` separates the classes
    at any cutoff decade inside the infrared region:

    - ``k <= -0.5``: power divergence ``I ~ eps^k``;
    - ``|k| < 0.5``: logarithmic divergence;
    - ``k >= 0.5``: convergent, ``I`` approaches its limit like ``eps^k``.

    Raises
    ------
    ClassificationError
        When the rate is not a clean power of the cutoff, or ``k`` lies
        within 0.1 of a class boundary.
    """
    if int(samples) < 3:
        raise ConfigError(f"need at least 3 samples, got {samples!r}")
    if not 0 < 10.0 * epsilon < p_max:
        raise ConfigError(f"cutoff decade [{epsilon}, {10 * epsilon}] must lie below p_max={p_max}")
    cutoffs = np.geomspace(epsilon, 10.0 * epsilon, int(samples))
    slices = np.array(
        [condensate_fraction_integral(d, lo, hi) for lo, hi in zip(cutoffs[:-1], cutoffs[1:])]
    )
    if np.any(slices <= 0):
        raise NumericalError(f"d={d}: non-positive slice integral in the cutoff scan")
    rates = slices / math.log(cutoffs[1] / cutoffs[0])
    midpoints = np.sqrt(cutoffs[:-1] * cutoffs[1:])
    fit = linregress(np.log(midpoints), np.log(rates))
    slope = float(fit.slope)
    residual = np.log(rates) - (fit.intercept + fit.slope * np.log(midpoints))
    score = float(np.sqrt(np.mean(residual**2)))
    integral = condensate_fraction_integral(d, epsilon, p_max)
    logger.debug("d=%d cutoff scan: I(eps)=%.6g, rate slope %.4f, residual %.2e", d, integral, slope, score)

    boundary_distance = min(abs(slope + CLASS_BOUNDARY), abs(slope - CLASS_BOUNDARY))
    if not score <= RATE_RESIDUAL_MAX or boundary_distance < CLASS_GAP:
        raise ClassificationError(
            f"d={d}: rate slope {slope:.3f} (residual {score:.2e}) does not single out "
            "a power, logarithmic or convergent cutoff dependence",
            context={"dimension": d, "epsilon": epsilon},
        )
    if slope <= -CLASS_BOUNDARY:
        return DivergenceReport(d, epsilon, p_max, integral, DivergenceClass.POWER, slope, 1.0 - score)
    if slope < CLASS_BOUNDARY:
        return DivergenceReport(
            d, epsilon, p_max, integral, DivergenceClass.LOGARITHMIC, None, 1.0 - score
        )
    return DivergenceReport(
        d, epsilon, p_max, integral, DivergenceClass.CONVERGENT, None, 1.0 - score
    )
