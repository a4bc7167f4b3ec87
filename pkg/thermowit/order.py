"""Two-point spin correlations and their decay classification."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from thermowit.models import Boundary, ModelOperators
from thermowit.thermal import ThermalEnsemble
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

MIN_POINTS = 5
LRO_TAIL_SPREAD = 0.01
SCORE_MARGIN = 0.10
ZERO_REL_TOL = 1e-14


class OpKind(Enum):
    """Spin operator pair entering the correlator."""

    ZZ = "zz"
    FULL_DOT = "full_dot"


class DecayClass(Enum):
    """Decay class of a correlation window."""

    LRO = "lro"
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"
    INCONCLUSIVE = "inconclusive"


def _site_signs(num_sites: int, site: int) -> np.ndarray:
    """``sigma^z`` eigenvalue of ``site`` on every computational basis state."""
    index = np.arange(2**num_sites)
    return 1.0 - 2.0 * ((index >> (num_sites - 1 - site)) & 1)


def _ensemble_for(source: Union[ModelOperators, ThermalEnsemble]) -> ThermalEnsemble:
    if isinstance(source, ThermalEnsemble):
        return source
    if isinstance(source, ModelOperators):
        return ThermalEnsemble(source, with_transverse=False)
    raise ConfigError(f"expected ModelOperators or ThermalEnsemble, got {type(source).__name__}")


def correlator(
    source: Union[ModelOperators, ThermalEnsemble],
    temperature: float,
    op_kind: Union[OpKind, str],
    i: int,
    j: int,
    connected: bool = False,
) -> float:
    """
    Thermal two-point correlator of sites ``i`` and ``j``.

    Parameters
    ----------
    source : Union[ModelOperators, ThermalEnsemble]
        Chain operators, or an ensemble to reuse its eigendecomposition.
    temperature : float
        Temperature in energy units.
    op_kind : Union[OpKind, str]
        ``zz`` for ``<s^z_i s^z_j>``, ``full_dot`` for ``<s_i . s_j>``.
    i, j : int
        Distinct sites.
    connected : bool
        Subtract ``<s^z_i><s^z_j>``; only defined for ``zz``.
    """
    try:
        kind = OpKind(op_kind)
    except ValueError as exc:
        raise ConfigError(f"unknown correlator kind {op_kind!r}") from exc
    ensemble = _ensemble_for(source)
    n = ensemble.num_sites
    if not (0 <= i < n and 0 <= j < n):
        raise ConfigError(f"sites ({i}, {j}) out of range for {n} sites")
    if i == j:
        raise ConfigError("correlator needs two distinct sites")
    if connected and kind is not OpKind.ZZ:
        raise ConfigError("connected correlators are defined for zz only")

    zi, zj = _site_signs(n, i), _site_signs(n, j)
    populations = ensemble.populations(temperature)
    zz = float(populations @ ensemble.diagonal_of_diagonal(zi * zj))
    if kind is OpKind.ZZ:
        if connected:
            mi = float(populations @ ensemble.diagonal_of_diagonal(zi))
            mj = float(populations @ ensemble.diagonal_of_diagonal(zj))
            return zz - mi * mj
        return zz

    # sigma^x sigma^x + sigma^y sigma^y = 2 (flip-flop) on anti-aligned pairs.
    vectors = ensemble.spectrum.eigenvectors
    index = np.arange(2**n)
    swap = index ^ ((1 << (n - 1 - i)) | (1 << (n - 1 - j)))
    anti = (zi != zj)[:, None]
    image = np.where(anti, 2.0 * vectors[swap], 0.0)
    transverse = np.einsum("ij,ij->j", vectors.conj(), image).real
    return zz + float(populations @ transverse)


@dataclass(frozen=True)
class CorrelationSeries:
    """Correlator values against separation."""

    separations: Tuple[int, ...]
    values: Tuple[float, ...]
    connected: bool = False
    op_kind: OpKind = OpKind.ZZ

    def __post_init__(self):
        separations = tuple(int(r) for r in self.separations)
        values = tuple(float(v) for v in self.values)
        if len(separations) != len(values):
            raise ConfigError("separations and values must have equal length")
        if any(b <= a for a, b in zip(separations, separations[1:])):
            raise ConfigError("separations must be strictly increasing")
        object.__setattr__(self, "separations", separations)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "op_kind", OpKind(self.op_kind))

    def to_record(self) -> Dict[str, Any]:
        return {
            "separations": list(self.separations),
            "values": list(self.values),
            "connected": self.connected,
            "op_kind": self.op_kind.value,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "CorrelationSeries":
        return cls(**record)


def correlation_series(
    source: Union[ModelOperators, ThermalEnsemble],
    temperature: float,
    op_kind: Union[OpKind, str] = OpKind.ZZ,
    reference_site: int = 0,
    separations: Optional[Sequence[int]] = None,
    connected: bool = False,
) -> CorrelationSeries:
    """
    Correlators between ``reference_site`` and the sites ``r`` further along.

    Rings wrap around; open chains must keep ``reference_site + r`` inside the
    chain. Default separations are ``1..N/2`` on rings and up to the last site
    on open chains.
    """
    ensemble = _ensemble_for(source)
    n = ensemble.num_sites
    periodic = ensemble.ops.spec.boundary is Boundary.PERIODIC
    if not 0 <= reference_site < n:
        raise ConfigError(f"reference site {reference_site} out of range for {n} sites")
    if separations is None:
        last = n // 2 if periodic else n - 1 - reference_site
        separations = range(1, last + 1)
    values = []
    for r in separations:
        if r < 1 or (not periodic and reference_site + r >= n) or (periodic and r % n == 0):
            raise ConfigError(f"separation {r} is not available from site {reference_site}")
        other = (reference_site + r) % n
        values.append(correlator(ensemble, temperature, op_kind, reference_site, other, connected))
    return CorrelationSeries(tuple(separations), tuple(values), connected, OpKind(op_kind))


@dataclass(frozen=True)
class DecayClassification:
    """Decay class of a finite correlation window."""

    decay_class: DecayClass
    eta: Optional[float]
    xi: Optional[float]
    fit_quality: float
    window: Tuple[int, int]
    staggered: bool = False
    dropped_points: int = 0
    scores: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "decay_class", DecayClass(self.decay_class))
        has_eta, has_xi = self.eta is not None, self.xi is not None
        expected = (
            self.decay_class is DecayClass.POWER_LAW,
            self.decay_class is DecayClass.EXPONENTIAL,
        )
        if (has_eta, has_xi) != expected:
            raise ConfigError(f"{self.decay_class.value} classification has eta={self.eta}, xi={self.xi}")

    def to_record(self) -> Dict[str, Any]:
        return {
            "decay_class": self.decay_class.value,
            "eta": self.eta,
            "xi": self.xi,
            "fit_quality": self.fit_quality,
            "window": list(self.window),
            "staggered": self.staggered,
            "dropped_points": self.dropped_points,
            "scores": dict(self.scores),
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "DecayClassification":
        data = dict(record)
        data["window"] = tuple(data["window"])
        return cls(**data)


def _is_staggered(separations: np.ndarray, values: np.ndarray) -> bool:
    """True when the sign flips with the parity of r."""
    signs = np.sign(values)
    if np.all(signs == signs[0]):
        return False
    parity = np.where(separations % 2 == 0, 1.0, -1.0)
    reduced = signs * parity
    return bool(np.all(reduced == reduced[0]))


def _tail(r: np.ndarray, magnitude: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Last half of the window, at least ``MIN_POINTS`` points."""
    size = max(MIN_POINTS, math.ceil(r.size / 2))
    return r[-size:], magnitude[-size:]


def _relative_rms(magnitude: np.ndarray, fitted: np.ndarray) -> float:
    """RMS residual of a fit to ``|C(r)|``, relative to the mean of ``|C(r)|``."""
    return float(np.sqrt(np.mean((magnitude - fitted) ** 2)) / np.mean(magnitude))


def _constant_fit(magnitude: np.ndarray) -> float:
    return _relative_rms(magnitude, np.full_like(magnitude, magnitude.mean()))


def _decaying_fit(x: np.ndarray, magnitude: np.ndarray) -> Tuple[float, float]:
    """
    ``(score, slope)`` of a straight-line fit of ``log|C|`` against ``x``.

    A fit that does not decay is no decaying model and scores ``inf``.
    """
    fit = linregress(x, np.log(magnitude))
    if not fit.slope < 0:
        return math.inf, float(fit.slope)
    fitted = np.exp(fit.intercept + fit.slope * x)
    return _relative_rms(magnitude, fitted), float(fit.slope)


def classify_decay(series: CorrelationSeries) -> DecayClassification:
    """
    Classify a correlation window as long-range, power-law or exponential.

    Three least-squares models are fitted to ``|C(r)|`` after dropping zero
    points: a constant, ``a r^-eta`` (log-log) and ``a exp(-r/xi)``
    (semilog). Each scores the RMS residual of ``|C|`` relative to its mean.

    Long-range order needs a flat tail: the constant fit over the last half
    of the window stays within 1%. Otherwise the lowest score wins unless the
    runner-up is within 10% of it; a constant that wins without a flat tail
    is inconclusive.

    Raises
    ------
    ConfigError
        With fewer than five usable points.
    """
    separations = np.asarray(series.separations, dtype=float)
    values = np.asarray(series.values, dtype=float)
    if separations.size < MIN_POINTS:
        raise ConfigError(f"decay classification needs {MIN_POINTS} points, got {separations.size}")
    if np.any(separations < 1):
        raise ConfigError("separations must be >= 1")
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    keep = np.abs(values) > ZERO_REL_TOL * scale
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        logger.warning("Dropped %d zero correlator point(s) before fitting", dropped)
    if np.count_nonzero(keep) < MIN_POINTS:
        raise ConfigError(
            f"only {np.count_nonzero(keep)} nonzero points remain, need {MIN_POINTS}"
        )
    r, c = separations[keep], values[keep]
    staggered = _is_staggered(r, c)
    magnitude = np.abs(c)
    window = (int(r[0]), int(r[-1]))

    tail_spread = _constant_fit(_tail(r, magnitude)[1])
    power_score, power_slope = _decaying_fit(np.log(r), magnitude)
    exp_score, exp_slope = _decaying_fit(r, magnitude)
    scores = {
        "constant": _constant_fit(magnitude),
        "power_law": power_score,
        "exponential": exp_score,
        "tail_spread": tail_spread,
    }
    if tail_spread <= LRO_TAIL_SPREAD:
        return DecayClassification(
            DecayClass.LRO, None, None, 1.0 - tail_spread, window, staggered, dropped, scores
        )

    ranked = sorted(("constant", "power_law", "exponential"), key=scores.__getitem__)
    best, runner_up = scores[ranked[0]], scores[ranked[1]]
    fit_quality = max(0.0, 1.0 - best)
    if (
        ranked[0] == "constant"
        or not math.isfinite(best)
        or runner_up - best < SCORE_MARGIN * runner_up
    ):
        return DecayClassification(
            DecayClass.INCONCLUSIVE, None, None, fit_quality, window, staggered, dropped, scores
        )
    if ranked[0] == "power_law":
        return DecayClassification(
            DecayClass.POWER_LAW, abs(power_slope), None, fit_quality,
            window, staggered, dropped, scores,
        )
    return DecayClassification(
        DecayClass.EXPONENTIAL, None, -1.0 / exp_slope, fit_quality,
        window, staggered, dropped, scores,
    )
