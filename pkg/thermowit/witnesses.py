"""Thermodynamic entanglement witnesses and (T, B) phase diagrams."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from thermowit.models import ChainSpec, build, separable_energy_bound
from thermowit.thermal import G_FACTOR, BOHR_MAGNETON, ThermalEnsemble, ThermoPoint
from utils.errors import ConfigError, SweepCellError, ToolkitError

logger = logging.getLogger(__name__)


class WitnessId(Enum):
    """Thermodynamic witnesses."""

    ENERGY = "energy"
    SUSCEPTIBILITY = "susceptibility"


class Verdict(Enum):
    """A witness can certify entanglement, never separability."""

    ENTANGLED = "entangled"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class WitnessVerdict:
    """Outcome of one witness; ``margin > 0`` means entangled."""

    witness_id: WitnessId
    value: float
    bound: float
    margin: float
    verdict: Verdict

    def __post_init__(self):
        object.__setattr__(self, "witness_id", WitnessId(self.witness_id))
        object.__setattr__(self, "verdict", Verdict(self.verdict))
        if (self.verdict is Verdict.ENTANGLED) != (self.margin > 0):
            raise ConfigError(
                f"verdict {self.verdict.value} inconsistent with margin {self.margin!r}"
            )

    @property
    def entangled(self) -> bool:
        return self.verdict is Verdict.ENTANGLED

    @property
    def normalized(self) -> float:
        """``value / bound``; above 1 flags the energy witness, below 1 the susceptibility one."""
        if self.bound == 0:
            return math.inf
        return self.value / self.bound

    def to_record(self) -> Dict[str, Any]:
        return {
            "witness_id": self.witness_id.value,
            "value": self.value,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict.value,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "WitnessVerdict":
        return cls(**record)


def _verdict(witness_id: WitnessId, value: float, bound: float, margin: float) -> WitnessVerdict:
    verdict = Verdict.ENTANGLED if margin > 0 else Verdict.UNKNOWN
    return WitnessVerdict(witness_id, float(value), float(bound), float(margin), verdict)


def energy_witness(u: float, field: float, m: float, num_sites: int, j: float) -> WitnessVerdict:
    """
    Energy witness: entangled when ``|U + B M| > N |J|``.

    Parameters
    ----------
    u : float
        Total internal energy ``<h_total>``, so that ``U + B M = <H_ex>``.
    field : float
        External field B.
    m : float
        Magnetization ``<M_z>``.
    num_sites : int
        Number of sites N, at least 2.
    j : float
        Coupling entering the separable bound, nonzero.
    """
    if num_sites < 2:
        raise ConfigError(f"energy witness needs N >= 2, got {num_sites}")
    if j == 0:
        raise ConfigError("energy witness needs a nonzero coupling")
    value = abs(u + field * m)
    bound = num_sites * abs(j)
    return _verdict(WitnessId.ENERGY, value, bound, value - bound)


def susceptibility_witness(
    chi: float, temperature: float, num_sites: int, g: float = G_FACTOR
) -> WitnessVerdict:
    """
    Susceptibility witness: entangled when ``chi < g^2 mu_B^2 N / (6 T)``.
    """
    if not temperature > 0:
        raise ConfigError(f"temperature must be positive, got {temperature!r}")
    if num_sites < 1:
        raise ConfigError(f"susceptibility witness needs N >= 1, got {num_sites}")
    threshold = g**2 * BOHR_MAGNETON**2 * num_sites / (6.0 * temperature)
    return _verdict(WitnessId.SUSCEPTIBILITY, chi, threshold, threshold - chi)


def gap_transition_estimate(j1: float, k_b: float = 1.0) -> float:
    """Transition temperature estimate ``J1 / k_B`` from the dimer gap."""
    if not j1 > 0:
        raise ConfigError(f"J1 must be positive, got {j1!r}")
    if not k_b > 0:
        raise ConfigError(f"k_B must be positive, got {k_b!r}")
    return j1 / k_b


@dataclass(frozen=True)
class PhaseCell:
    """Observables and both verdicts at one (T, B) point."""

    point: ThermoPoint
    energy: WitnessVerdict
    susceptibility: WitnessVerdict

    def verdict(self, witness_id: WitnessId) -> WitnessVerdict:
        if WitnessId(witness_id) is WitnessId.ENERGY:
            return self.energy
        return self.susceptibility

    def to_record(self) -> Dict[str, Any]:
        return {
            "point": self.point.to_record(),
            "energy": self.energy.to_record(),
            "susceptibility": self.susceptibility.to_record(),
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "PhaseCell":
        return cls(
            point=ThermoPoint.from_record(record["point"]),
            energy=WitnessVerdict.from_record(record["energy"]),
            susceptibility=WitnessVerdict.from_record(record["susceptibility"]),
        )


@dataclass(frozen=True, eq=False)
class PhaseDiagram:
    """Witness verdicts on a (T, B) grid; ``cells[b_index][t_index]``."""

    spec: ChainSpec
    t_axis: Tuple[float, ...]
    b_axis: Tuple[float, ...]
    cells: Tuple[Tuple[PhaseCell, ...], ...]

    def __post_init__(self):
        _check_axis(self.t_axis, "T", positive=True)
        _check_axis(self.b_axis, "B", positive=False)
        if len(self.cells) != len(self.b_axis) or any(
            len(row) != len(self.t_axis) for row in self.cells
        ):
            raise ConfigError("phase diagram grid is incomplete")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.b_axis), len(self.t_axis)

    def rows(self) -> Iterator[PhaseCell]:
        """Cells in B-major, then T order."""
        for row in self.cells:
            yield from row

    def entangled_mask(self, witness_id: WitnessId) -> np.ndarray:
        """Boolean grid of shape ``(len(b_axis), len(t_axis))``."""
        return np.array(
            [[cell.verdict(witness_id).entangled for cell in row] for row in self.cells],
            dtype=bool,
        )


def _check_axis(axis: Sequence[float], name: str, positive: bool) -> None:
    values = np.asarray(axis, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ConfigError(f"{name} axis must be a nonempty sequence")
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"{name} axis must be finite")
    if positive and np.any(values <= 0):
        raise ConfigError(f"{name} axis must be positive")
    if np.any(np.diff(values) <= 0):
        raise ConfigError(f"{name} axis must be strictly increasing")


def evaluate_cell(
    spec: ChainSpec,
    ensemble: ThermalEnsemble,
    zero_field: ThermalEnsemble,
    temperature: float,
) -> PhaseCell:
    """Witness verdicts at one temperature from prepared ensembles."""
    point = ensemble.point(temperature)
    zero = zero_field.point(temperature)
    chi_zero = zero.chi if zero.chi_powder is None else zero.chi_powder
    num_sites, coupling = separable_energy_bound(spec)
    energy = energy_witness(point.u_total, point.field, point.m, num_sites, coupling)
    susceptibility = susceptibility_witness(chi_zero, temperature, num_sites)
    return PhaseCell(point, energy, susceptibility)


def cell_ensembles(
    spec: ChainSpec, zero_field: Optional[ThermalEnsemble] = None
) -> Tuple[ThermalEnsemble, ThermalEnsemble]:
    """Ensemble at ``spec.field`` and the zero-field ensemble the susceptibility witness reads."""
    if zero_field is None:
        zero_field = ThermalEnsemble(build(spec.with_field(0.0)))
    if spec.field == 0.0:
        return zero_field, zero_field
    return ThermalEnsemble(build(spec), with_transverse=False), zero_field


def evaluate_point(spec: ChainSpec, temperature: float) -> PhaseCell:
    """
    Observables and both witness verdicts at one temperature.

    The susceptibility witness uses the zero-field susceptibility whatever
    ``spec.field`` is.
    """
    ensemble, zero_field = cell_ensembles(spec)
    return evaluate_cell(spec, ensemble, zero_field, temperature)


def _sweep_row(
    template: ChainSpec,
    field: float,
    t_axis: Sequence[float],
    zero_field: ThermalEnsemble,
) -> Tuple[PhaseCell, ...]:
    spec = template.with_field(field)
    try:
        ensemble, _ = cell_ensembles(spec, zero_field)
    except ConfigError as exc:
        exc.context.update(temperature=t_axis[0], field=field)
        raise
    except ToolkitError as exc:
        raise SweepCellError(exc.message, t_axis[0], field) from exc
    cells = []
    for temperature in t_axis:
        try:
            cells.append(evaluate_cell(spec, ensemble, zero_field, temperature))
        except ConfigError as exc:
            # preconditions keep their exit code
            exc.context.update(temperature=temperature, field=field)
            raise
        except ToolkitError as exc:
            raise SweepCellError(exc.message, temperature, field) from exc
    logger.debug("Row B=%g done (%d cells)", field, len(cells))
    return tuple(cells)


def sweep(
    template: ChainSpec,
    t_axis: Sequence[float],
    b_axis: Sequence[float],
    max_workers: int = 1,
    progress: bool = False,
) -> PhaseDiagram:
    """
    Evaluate both witnesses on every (T, B) grid point.

    Each field row shares one eigendecomposition; rows run on a thread pool
    and are merged by index, so the result does not depend on ``max_workers``.

    Parameters
    ----------
    template : ChainSpec
        Chain description; its field is replaced by each ``b_axis`` value.
    t_axis : Sequence[float]
        Strictly increasing positive temperatures.
    b_axis : Sequence[float]
        Strictly increasing fields.
    max_workers : int
        Thread pool size.
    progress : bool
        Show a tqdm progress bar over rows.

    Raises
    ------
    SweepCellError
        When a cell fails; carries its coordinates.
    ConfigError
        When a cell input breaks a precondition; its context holds the cell.
    """
    _check_axis(t_axis, "T", positive=True)
    _check_axis(b_axis, "B", positive=False)
    if max_workers < 1:
        raise ConfigError(f"max_workers must be positive, got {max_workers}")
    t_values = tuple(float(t) for t in t_axis)
    b_values = tuple(float(b) for b in b_axis)
    logger.info(
        "Sweeping %s chain N=%d over %d x %d grid",
        template.model.value, template.num_sites, len(b_values), len(t_values),
    )
    try:
        zero_field = ThermalEnsemble(build(template.with_field(0.0)))
    except ConfigError:
        raise
    except ToolkitError as exc:
        raise SweepCellError(exc.message, t_values[0], 0.0) from exc

    rows: List[Optional[Tuple[PhaseCell, ...]]] = [None] * len(b_values)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {
            pool.submit(_sweep_row, template, field, t_values, zero_field): index
            for index, field in enumerate(b_values)
        }
        with tqdm(total=len(futures), desc="Sweep", unit="row", disable=not progress) as pbar:
            try:
                for future in as_completed(futures):
                    rows[futures[future]] = future.result()
                    pbar.update(1)
            except BaseException:
                for future in futures:
                    future.cancel()
                raise

    return PhaseDiagram(template, t_values, b_values, tuple(row for row in rows if row is not None))
