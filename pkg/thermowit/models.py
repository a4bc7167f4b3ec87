"""Spin-chain Hamiltonians: dimer, XXX, XX and alternating J1-J2 chains.

Sign convention: ``H_ex = +J sum sigma_j . sigma_{j+1}`` with ``J > 0``
antiferromagnetic, so the singlet is the dimer ground state. The field couples
through ``M = 1/2 sum sigma^z_j`` as ``H_total = H_ex - B M``, which puts the
dimer level crossing at ``B = 4J``.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.linalg

from thermowit.core import (
    MAX_SITES,
    PAULI_X,
    PAULI_Z,
    HermitianOperator,
    eigh,
    embed_local,
    kron_sites,
)
from utils.errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

MIN_SITES = 2
# i * sigma_y is real; sigma_y (x) sigma_y = -(i sigma_y) (x) (i sigma_y).
_I_PAULI_Y = np.array([[0.0, 1.0], [-1.0, 0.0]])
DEGENERACY_TOL = 1e-9


class ModelKind(Enum):
    """Exchange model of a chain."""

    XXX = "xxx"
    XX = "xx"
    ALTERNATING = "alternating"


class Boundary(Enum):
    """Chain boundary condition."""

    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ChainSpec:
    """Full description of a spin-chain model instance."""

    num_sites: int
    """Number of spin-1/2 sites, 2..12."""

    model: ModelKind = ModelKind.XXX
    """Exchange model."""

    j: float = 1.0
    """Uniform coupling of the XXX and XX models."""

    j1: float = 1.0
    """Intra-dimer coupling of the alternating model (bonds 2j, 2j+1)."""

    j2: float = 0.0
    """Inter-dimer coupling of the alternating model (bonds 2j+1, 2j+2)."""

    field: float = 0.0
    """External field B in energy units."""

    boundary: Boundary = Boundary.OPEN
    """Open chain or ring."""

    def __post_init__(self):
        try:
            object.__setattr__(self, "model", ModelKind(self.model))
            object.__setattr__(self, "boundary", Boundary(self.boundary))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if isinstance(self.num_sites, bool) or int(self.num_sites) != self.num_sites:
            raise ConfigError(f"num_sites must be an integer, got {self.num_sites!r}")
        object.__setattr__(self, "num_sites", int(self.num_sites))
        if not MIN_SITES <= self.num_sites <= MAX_SITES:
            raise ConfigError(f"num_sites must be in {MIN_SITES}..{MAX_SITES}, got {self.num_sites}")
        for name in ("j", "j1", "j2", "field"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.model is ModelKind.ALTERNATING:
            if self.num_sites % 2:
                raise ConfigError("the alternating chain needs an even number of sites")
            if self.j1 <= 0:
                raise ConfigError(f"alternating chain needs J1 > 0, got {self.j1}")
            if self.j2 < 0:
                raise ConfigError(f"alternating chain needs J2 >= 0, got {self.j2}")

    @classmethod
    def dimer(cls, j: float = 1.0, field: float = 0.0) -> "ChainSpec":
        """Two spins coupled by a single XXX bond."""
        return cls(num_sites=2, model=ModelKind.XXX, j=j, field=field)

    def with_field(self, field: float) -> "ChainSpec":
        return replace(self, field=field)

    def to_record(self) -> Dict[str, Any]:
        return {
            "num_sites": self.num_sites,
            "model": self.model.value,
            "j": self.j,
            "j1": self.j1,
            "j2": self.j2,
            "field": self.field,
            "boundary": self.boundary.value,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "ChainSpec":
        return cls(**record)


@dataclass(frozen=True, eq=False)
class ModelOperators:
    """Exchange Hamiltonian, magnetization and total Hamiltonian of one chain."""

    spec: ChainSpec
    h_exchange: HermitianOperator
    magnetization: HermitianOperator
    h_total: HermitianOperator

    def __post_init__(self):
        expected = self.h_exchange.entries - self.spec.field * self.magnetization.entries
        scale = max(1.0, float(np.max(np.abs(expected))))
        if self.h_total.entries.shape != expected.shape or not np.allclose(
            self.h_total.entries, expected, rtol=0.0, atol=1e-12 * scale
        ):
            raise ConfigError("h_total must equal h_exchange - field * magnetization")

    @property
    def num_sites(self) -> int:
        return self.spec.num_sites

    def transverse_magnetization(self) -> HermitianOperator:
        """``M_x = 1/2 sum sigma^x_j``."""
        n = self.num_sites
        total = sum(kron_sites({site: PAULI_X}, n) for site in range(n))
        return HermitianOperator(0.5 * total)


@dataclass(frozen=True)
class SpectralGap:
    """Gap between the two lowest distinct levels of ``h_total``."""

    gap: float
    degenerate: bool
    ground_degeneracy: int


def bonds(spec: ChainSpec) -> List[Tuple[int, int, float]]:
    """
    Exchange bonds ``(i, j, J_ij)`` of a chain.

    A ring closes with the bond ``(N-1, 0)`` for ``N >= 3``; on two sites it
    would duplicate the only bond.
    """
    n = spec.num_sites
    pairs = [(site, site + 1) for site in range(n - 1)]
    if spec.boundary is Boundary.PERIODIC and n >= 3:
        pairs.append((n - 1, 0))
    if spec.model is ModelKind.ALTERNATING:
        return [(i, j, spec.j1 if i % 2 == 0 else spec.j2) for i, j in pairs]
    return [(i, j, spec.j) for i, j in pairs]


def exchange_axes(spec: ChainSpec) -> Tuple[float, float, float]:
    """Weights of the (x, y, z) components in each bond."""
    if spec.model is ModelKind.XX:
        return (1.0, 1.0, 0.0)
    return (1.0, 1.0, 1.0)


def separable_energy_bound(spec: ChainSpec) -> Tuple[int, float]:
    """
    ``(N, |J|)`` entering the product-state bound ``|<H_ex>| <= N |J|``.

    For alternating chains the larger coupling is used, which keeps the bound
    valid bond by bond.
    """
    if spec.model is ModelKind.ALTERNATING:
        return spec.num_sites, max(abs(spec.j1), abs(spec.j2))
    return spec.num_sites, abs(spec.j)


def spin_exchange_to_pauli(j: float) -> float:
    """Coupling for ``J sum sigma.sigma`` equivalent to an exchange ``J sum S.S``."""
    return j / 4.0


def _exchange_matrix(spec: ChainSpec) -> np.ndarray:
    n = spec.num_sites
    wx, wy, wz = exchange_axes(spec)
    h = np.zeros((2**n, 2**n))
    for i, j, coupling in bonds(spec):
        if coupling == 0.0:
            continue
        if wx:
            h += coupling * wx * kron_sites({i: PAULI_X, j: PAULI_X}, n)
        if wy:
            h -= coupling * wy * kron_sites({i: _I_PAULI_Y, j: _I_PAULI_Y}, n)
        if wz:
            h += coupling * wz * kron_sites({i: PAULI_Z, j: PAULI_Z}, n)
    return h


def build(spec: ChainSpec) -> ModelOperators:
    """
    Build the exchange Hamiltonian, magnetization and total Hamiltonian.

    Parameters
    ----------
    spec : ChainSpec
        Chain description.

    Returns
    -------
    ModelOperators
        ``h_total = h_exchange - field * magnetization``.
    """
    n = spec.num_sites
    h_exchange = HermitianOperator(_exchange_matrix(spec))
    magnetization = HermitianOperator(
        0.5 * sum(embed_local(PAULI_Z, site, n).entries for site in range(n))
    )
    h_total = HermitianOperator(h_exchange.entries - spec.field * magnetization.entries)
    logger.debug(
        "Built %s chain: N=%d, %d bonds, B=%g, %s",
        spec.model.value, n, len(bonds(spec)), spec.field, spec.boundary.value,
    )
    return ModelOperators(spec, h_exchange, magnetization, h_total)


def spectral_gap(ops: ModelOperators) -> SpectralGap:
    """
    Gap ``E1 - E0`` of ``h_total``.

    A degenerate ground level is reported as gap 0 with ``degenerate=True``.
    """
    try:
        energies = scipy.linalg.eigvalsh(ops.h_total.entries)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    tol = DEGENERACY_TOL * max(1.0, float(energies[-1] - energies[0]))
    ground_degeneracy = int(np.count_nonzero(energies - energies[0] <= tol))
    if ground_degeneracy > 1:
        return SpectralGap(gap=0.0, degenerate=True, ground_degeneracy=ground_degeneracy)
    return SpectralGap(
        gap=float(energies[1] - energies[0]), degenerate=False, ground_degeneracy=1
    )


def ground_state_overlap(spec: ChainSpec, field_a: float, field_b: float) -> float:
    """
    Fidelity ``|<g(B_a)|g(B_b)>|`` between ground states at two fields.

    Raises
    ------
    NumericalError
        If either ground level is degenerate (the ground state is not unique).
    """
    vectors = []
    for field in (field_a, field_b):
        ops = build(spec.with_field(field))
        if spectral_gap(ops).degenerate:
            raise NumericalError(f"ground state at B={field:g} is degenerate")
        vectors.append(eigh(ops.h_total).eigenvectors[:, 0])
    return float(abs(np.vdot(vectors[0], vectors[1])))
