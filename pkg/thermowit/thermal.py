"""Thermodynamic observables of chain thermal states and the XX free-fermion solver."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import expit

from thermowit.core import (
    DensityMatrix,
    SpectralDecomposition,
    boltzmann_populations,
    concurrence,
    eigh,
    partial_trace,
    thermal_state,
)
from thermowit.models import ModelOperators
from utils.errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

G_FACTOR = 2.0
BOHR_MAGNETON = 1.0
HEAT_CAPACITY_REL_STEP = 1e-4
FIELD_STEP = 1e-5
MAX_FREE_FERMION_MODES = 1 << 20


@dataclass(frozen=True)
class ThermoPoint:
    """Thermodynamic observables at one (T, B) point."""

    temperature: float
    field: float
    u: float
    """Exchange internal energy <H_ex>."""
    m: float
    """Magnetization <M_z>."""
    chi: float
    """Fluctuation susceptibility along z, g^2 mu_B^2 Var(M_z) / T."""
    c: float
    """Heat capacity d<h_total>/dT."""
    u_total: float
    """<h_total>; ``u_total + field * m == u``."""
    chi_powder: Optional[float]
    """Direction average (2 chi_x + chi_z) / 3, None when not computed."""
    num_sites: int
    per_site: bool = False

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "ThermoPoint":
        return cls(**record)


def _check_temperature(temperature: float) -> float:
    temperature = float(temperature)
    if not temperature > 0 or not math.isfinite(temperature):
        raise ConfigError(f"temperature must be positive and finite, got {temperature!r}")
    return temperature


def _transverse_image(vectors: np.ndarray, num_sites: int) -> np.ndarray:
    """``M_x V`` computed with bit flips instead of a dense product."""
    index = np.arange(vectors.shape[0])
    image = np.zeros_like(vectors)
    for bit in range(num_sites):
        image += vectors[index ^ (1 << bit)]
    return 0.5 * image


class ThermalEnsemble:
    """
    Gibbs ensembles of one chain at any temperature.

    The eigendecomposition of ``h_total`` is computed once together with the
    eigenbasis diagonals of the observables, so each temperature costs a
    weighted sum over the spectrum.

    Parameters
    ----------
    ops : ModelOperators
        Chain operators.
    with_transverse : bool
        Also prepare ``M_x`` diagonals for the direction-averaged susceptibility.
    spectrum : Optional[SpectralDecomposition]
        Precomputed eigendecomposition of ``ops.h_total``.
    """

    def __init__(
        self,
        ops: ModelOperators,
        with_transverse: bool = True,
        spectrum: Optional[SpectralDecomposition] = None,
    ):
        self.ops = ops
        self.num_sites = ops.num_sites
        self.spectrum = spectrum if spectrum is not None else eigh(ops.h_total)
        vectors = self.spectrum.eigenvectors
        self._weights = np.abs(vectors) ** 2
        mz = ops.magnetization.entries.diagonal().real
        self._mz = self.diagonal_of_diagonal(mz)
        self._mz2 = self.diagonal_of_diagonal(mz**2)
        self._energies = self.spectrum.eigenvalues
        self._h_exchange = self._energies + ops.spec.field * self._mz
        self._mx: Optional[np.ndarray] = None
        self._mx2: Optional[np.ndarray] = None
        if with_transverse:
            image = _transverse_image(vectors, self.num_sites)
            self._mx = np.einsum("ij,ij->j", vectors.conj(), image).real
            self._mx2 = np.einsum("ij,ij->j", image.conj(), image).real
        logger.debug(
            "Thermal ensemble ready: N=%d, B=%g, transverse=%s",
            self.num_sites, ops.spec.field, with_transverse,
        )

    @property
    def field(self) -> float:
        return self.ops.spec.field

    def diagonal_of_diagonal(self, values: np.ndarray) -> np.ndarray:
        """Eigenbasis diagonal of an operator diagonal in the computational basis."""
        return self._weights.T @ np.asarray(values, dtype=float)

    def populations(self, temperature: float) -> np.ndarray:
        populations, _ = boltzmann_populations(self._energies, _check_temperature(temperature))
        return populations

    def average(self, diagonal: np.ndarray, temperature: float) -> float:
        """Thermal average of an observable given by its eigenbasis diagonal."""
        return float(self.populations(temperature) @ diagonal)

    def u_total(self, temperature: float) -> float:
        return self.average(self._energies, temperature)

    def heat_capacity(self, temperature: float) -> float:
        """Centered difference of ``<h_total>`` with relative step 1e-4."""
        temperature = _check_temperature(temperature)
        step = HEAT_CAPACITY_REL_STEP * temperature
        upper = self.u_total(temperature + step)
        lower = self.u_total(temperature - step)
        return (upper - lower) / (2.0 * step)

    def state(self, temperature: float) -> DensityMatrix:
        return thermal_state(self.spectrum, _check_temperature(temperature))

    def point(self, temperature: float) -> ThermoPoint:
        """All observables at ``temperature`` and this ensemble's field."""
        temperature = _check_temperature(temperature)
        p = self.populations(temperature)
        scale = G_FACTOR**2 * BOHR_MAGNETON**2 / temperature
        m = float(p @ self._mz)
        chi = max(0.0, scale * (float(p @ self._mz2) - m * m))
        chi_powder = None
        if self._mx is not None and self._mx2 is not None:
            mx = float(p @ self._mx)
            # U(1) symmetry about z: Var M_y equals Var M_x.
            chi_x = max(0.0, scale * (float(p @ self._mx2) - mx * mx))
            chi_powder = (2.0 * chi_x + chi) / 3.0
        return ThermoPoint(
            temperature=temperature,
            field=self.field,
            u=float(p @ self._h_exchange),
            m=m,
            chi=chi,
            c=self.heat_capacity(temperature),
            u_total=float(p @ self._energies),
            chi_powder=chi_powder,
            num_sites=self.num_sites,
        )


def observables(ops: ModelOperators, temperature: float) -> ThermoPoint:
    """
    Thermodynamic observables of the Gibbs state of ``ops.h_total``.

    Parameters
    ----------
    ops : ModelOperators
        Chain operators.
    temperature : float
        Temperature in energy units (k_B = 1).

    Returns
    -------
    ThermoPoint
        ``u = <H_ex>``, ``m = <M_z>``, fluctuation ``chi`` and heat capacity ``c``.
    """
    return ThermalEnsemble(ops).point(temperature)


def energy_from_heat_capacity(
    ops: ModelOperators, t_lo: float, t_hi: float, steps: int = 200
) -> float:
    """
    Reconstruct ``<h_total>(t_hi) - <h_total>(t_lo)`` by integrating C(T).

    The heat capacity is sampled on ``steps`` uniform intervals and integrated
    with the trapezoid rule.
    """
    t_lo, t_hi = _check_temperature(t_lo), _check_temperature(t_hi)
    if not t_lo < t_hi:
        raise ConfigError(f"need t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if int(steps) < 1:
        raise ConfigError(f"steps must be positive, got {steps}")
    ensemble = ThermalEnsemble(ops, with_transverse=False)
    grid = np.linspace(t_lo, t_hi, int(steps) + 1)
    capacities = np.array([ensemble.heat_capacity(t) for t in grid])
    return float(trapezoid(capacities, grid))


def pair_concurrence(ensemble: ThermalEnsemble, temperature: float, i: int, j: int) -> float:
    """Concurrence of the two-site reduced thermal state on sites ``i`` and ``j``."""
    if i == j:
        raise ConfigError("pair concurrence needs two distinct sites")
    reduced = partial_trace(ensemble.state(temperature), (i, j), ensemble.num_sites)
    return concurrence(reduced)


# Free fermions.
#
# Jordan-Wigner with particle = spin up maps the XX ring onto hopping fermions
# with eps(k) = 4 J cos k - B plus a constant B N / 2. Even fermion number
# sees antiperiodic momenta, odd fermion number periodic ones, giving
# Z = 1/2 [prod_A(1+x) + prod_A(1-x) + prod_P(1+x) - prod_P(1-x)], x = exp(-eps/T).


@dataclass(frozen=True)
class _FermionTerm:
    """One signed product ``coeff * sign * exp(log_scale) * (z, zn, ze)``."""

    log_scale: float
    sign: float
    z: float
    zn: float
    ze: float


def _fermion_term(energies: np.ndarray, beta: float, occupation_sign: float) -> Optional[_FermionTerm]:
    """Partition-sum product over ``1 + s exp(-beta eps)`` with its N and E moments."""
    b = beta * energies
    if occupation_sign > 0:
        logs = np.logaddexp(0.0, -b)
        ratios = expit(-b)
        return _FermionTerm(
            float(logs.sum()), 1.0, 1.0, float(ratios.sum()), float((energies * ratios).sum())
        )
    zero = b == 0.0
    if np.count_nonzero(zero) > 1:
        return None
    safe = np.where(zero, 1.0, b)
    # |1 - x| in log space for both signs of eps.
    logs = np.where(
        safe > 0,
        np.log(-np.expm1(-np.abs(safe))),
        np.abs(safe) + np.log(-np.expm1(-np.abs(safe))),
    )
    sign = -1.0 if np.count_nonzero((~zero) & (b < 0)) % 2 else 1.0
    if zero.any():
        return _FermionTerm(float(logs[~zero].sum()), sign, 0.0, -1.0, 0.0)
    ratios = -1.0 / np.expm1(safe)
    return _FermionTerm(
        float(logs.sum()), sign, 1.0, float(ratios.sum()), float((energies * ratios).sum())
    )


def _combine(terms: List[Tuple[float, Optional[_FermionTerm]]]) -> Tuple[float, float]:
    """Return ``(<N_f>, <E_f>)`` from signed partition-sum terms."""
    live = [(coeff, term) for coeff, term in terms if term is not None]
    top = max(term.log_scale for _, term in live)
    z = n = e = 0.0
    for coeff, term in live:
        weight = coeff * term.sign * math.exp(term.log_scale - top)
        z += weight * term.z
        n += weight * term.zn
        e += weight * term.ze
    if not z > 0 or not math.isfinite(z):
        raise NumericalError(f"free-fermion partition sum is not positive ({z!r})")
    return n / z, e / z


def _fermion_moments(
    j: float, field: float, temperature: float, num_modes: int, parity_projected: bool
) -> Tuple[float, float]:
    """Total ``(<M>, <h_total>)`` of the XX ring from free fermions."""
    beta = 1.0 / temperature
    modes = np.arange(num_modes)
    periodic = 4.0 * j * np.cos(2.0 * np.pi * modes / num_modes) - field
    if parity_projected:
        antiperiodic = 4.0 * j * np.cos(2.0 * np.pi * (modes + 0.5) / num_modes) - field
        number, energy = _combine(
            [
                (1.0, _fermion_term(antiperiodic, beta, 1.0)),
                (1.0, _fermion_term(antiperiodic, beta, -1.0)),
                (1.0, _fermion_term(periodic, beta, 1.0)),
                (-1.0, _fermion_term(periodic, beta, -1.0)),
            ]
        )
    else:
        occupations = expit(-beta * periodic)
        number, energy = float(occupations.sum()), float((periodic * occupations).sum())
    magnetization = number - 0.5 * num_modes
    return magnetization, energy + 0.5 * field * num_modes


def xx_thermo_free_fermion(
    j: float,
    field: float,
    temperature: float,
    num_modes: int,
    parity_projected: bool = True,
) -> ThermoPoint:
    """
    Per-site thermodynamics of the periodic XX ring via Jordan-Wigner fermions.

    Parameters
    ----------
    j : float
        XX coupling.
    field : float
        External field B.
    temperature : float
        Temperature in energy units.
    num_modes : int
        Ring length (number of momentum modes), at least 2.
    parity_projected : bool
        Exact finite-ring result when True, plain grand-canonical momentum sum
        over periodic momenta otherwise.

    Returns
    -------
    ThermoPoint
        Per-site values; ``chi = 4 dM/dB`` and ``c = dU_total/dT`` by centered
        differences, ``chi_powder`` is not computed.
    """
    temperature = _check_temperature(temperature)
    if isinstance(num_modes, bool) or int(num_modes) != num_modes or num_modes < 2:
        raise ConfigError(f"num_modes must be an integer >= 2, got {num_modes!r}")
    n = int(num_modes)
    j, field = float(j), float(field)

    def moments(b: float, t: float) -> Tuple[float, float]:
        return _fermion_moments(j, b, t, n, parity_projected)

    m, u_total = moments(field, temperature)
    h = FIELD_STEP * max(1.0, abs(j), abs(field))
    dm_db = (moments(field + h, temperature)[0] - moments(field - h, temperature)[0]) / (2.0 * h)
    dt = HEAT_CAPACITY_REL_STEP * temperature
    c = (moments(field, temperature + dt)[1] - moments(field, temperature - dt)[1]) / (2.0 * dt)
    values = np.array([m, u_total, dm_db, c])
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"free-fermion sums are not finite at T={temperature!r}, B={field!r}")
    return ThermoPoint(
        temperature=temperature,
        field=field,
        u=(u_total + field * m) / n,
        m=m / n,
        chi=max(0.0, G_FACTOR**2 * BOHR_MAGNETON**2 * dm_db / n),
        c=c / n,
        u_total=u_total / n,
        chi_powder=None,
        num_sites=n,
        per_site=True,
    )


def xx_thermo_thermodynamic_limit(
    j: float,
    field: float,
    temperature: float,
    rtol: float = 1e-8,
    start_modes: int = 16,
    max_modes: int = MAX_FREE_FERMION_MODES,
) -> ThermoPoint:
    """
    Infinite-chain limit of :func:`xx_thermo_free_fermion`.

    The mode count doubles until per-site U and M change by less than ``rtol``.

    Raises
    ------
    NumericalError
        When ``max_modes`` is reached without convergence.
    """
    if not rtol > 0:
        raise ConfigError(f"rtol must be positive, got {rtol!r}")
    modes = max(2, int(start_modes))
    previous = xx_thermo_free_fermion(j, field, temperature, modes)
    while modes < max_modes:
        modes *= 2
        current = xx_thermo_free_fermion(j, field, temperature, modes)
        delta = max(abs(current.u - previous.u), abs(current.m - previous.m))
        if delta <= rtol * max(1.0, abs(current.u), abs(current.m)):
            logger.debug("Free-fermion sum converged at %d modes (delta %.2e)", modes, delta)
            return current
        previous = current
    raise NumericalError(
        f"free-fermion momentum sum did not converge within {max_modes} modes "
        f"(T={temperature:g}, B={field:g})"
    )
