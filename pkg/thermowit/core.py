"""Operator algebra on qubit registers: embedding, spectra, thermal states, entanglement.

Basis convention: sites are ordered big-endian (site 0 is the leftmost tensor
factor, i.e. the most significant bit of a basis index) and ``|0>`` is the
``sigma_z = +1`` eigenstate.
"""

import logging
import string
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from utils.errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
IMAGINARY_RESIDUE_TOL = 1e-10
# 4096 x 4096 dense matrices are the ceiling for dense diagonalization.
MAX_SITES = 12
# Eigenvalue-based positivity is only checked up to this dimension.
POSITIVITY_CHECK_MAX_DIM = 1024
_WOOTTERS_FLOOR = 1e-14

IDENTITY_2 = np.eye(2)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

ArrayLike = Union[np.ndarray, "HermitianOperator", Sequence[Sequence[complex]]]


def pauli_matrices() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return copies of (sigma_x, sigma_y, sigma_z)."""
    return PAULI_X.copy(), PAULI_Y.copy(), PAULI_Z.copy()


def _as_matrix(entries) -> np.ndarray:
    if isinstance(entries, (HermitianOperator, DensityMatrix)):
        return entries.entries
    arr = np.array(entries)
    if arr.dtype.kind not in "biufc":
        raise ConfigError(f"operator entries must be numeric, got dtype {arr.dtype}")
    if np.iscomplexobj(arr):
        # Real-valued operators are stored real: halves memory, speeds up eigh.
        if not np.any(arr.imag):
            return np.ascontiguousarray(arr.real, dtype=float)
        return np.ascontiguousarray(arr, dtype=complex)
    return np.ascontiguousarray(arr, dtype=float)


def _require_square(arr: np.ndarray, what: str) -> None:
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ConfigError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")


def _hermiticity_defect(arr: np.ndarray) -> float:
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(arr - arr.conj().T))) / scale


def _num_sites_for_dim(dim: int) -> int:
    num_sites = int(dim).bit_length() - 1
    if num_sites < 1 or 2**num_sites != dim:
        raise ConfigError(f"dimension {dim} is not a power of two of a qubit register")
    return num_sites


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian operator on a finite-dimensional Hilbert space."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.entries)
        _require_square(arr, "HermitianOperator")
        defect = _hermiticity_defect(arr)
        if defect > HERMITIAN_TOL:
            raise ConfigError(f"operator is not Hermitian (relative defect {defect:.3e})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.entries + _as_matrix(other))

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.entries - _as_matrix(other))

    def scaled(self, factor: float) -> "HermitianOperator":
        """Return ``factor * self`` for a real factor."""
        return HermitianOperator(float(factor) * self.entries)

    def commutator_norm(self, other: "HermitianOperator") -> float:
        """Largest entry magnitude of ``[self, other]``."""
        a, b = self.entries, _as_matrix(other)
        return float(np.max(np.abs(a @ b - b @ a)))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and column eigenvectors of a Hermitian operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        vectors = np.array(self.eigenvectors)
        if values.ndim != 1 or vectors.shape != (values.size, values.size):
            raise ConfigError(
                f"eigenvector matrix {vectors.shape} does not match {values.size} eigenvalues"
            )
        if values.size > 1 and np.any(np.diff(values) < 0):
            raise ConfigError("eigenvalues must be sorted ascending")
        values.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def spectral_width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def reconstruct(self) -> np.ndarray:
        """Return ``V diag(lambda) V^dagger``."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite, unit-trace Hermitian matrix."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.entries)
        _require_square(arr, "DensityMatrix")
        defect = _hermiticity_defect(arr)
        if defect > HERMITIAN_TOL:
            raise ConfigError(f"density matrix is not Hermitian (relative defect {defect:.3e})")
        trace = float(np.trace(arr).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ConfigError(f"density matrix trace is {trace!r}, expected 1")
        if arr.shape[0] <= POSITIVITY_CHECK_MAX_DIM:
            lowest = float(scipy.linalg.eigvalsh(arr)[0])
            if lowest < -POSITIVITY_TOL:
                raise ConfigError(f"density matrix has negative eigenvalue {lowest:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_pure(cls, vector: Iterable[complex]) -> "DensityMatrix":
        """Projector onto a (normalized on the fly) state vector."""
        psi = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ConfigError("state vector must be nonzero")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)


def kron_sites(site_ops: Mapping[int, ArrayLike], num_sites: int) -> np.ndarray:
    """Raw tensor product of 2x2 matrices keyed by site (identity elsewhere), unchecked for Hermiticity."""
    if not 1 <= int(num_sites) <= MAX_SITES:
        raise ConfigError(f"num_sites must be in 1..{MAX_SITES}, got {num_sites}")
    factors = {}
    for site, op in site_ops.items():
        if not 0 <= int(site) < num_sites:
            raise ConfigError(f"site {site} out of range for {num_sites} sites")
        mat = _as_matrix(op)
        if mat.shape != (2, 2):
            raise ConfigError(f"single-site operator must be 2x2, got shape {mat.shape}")
        factors[int(site)] = mat
    result = np.ones((1, 1))
    for site in range(num_sites):
        result = np.kron(result, factors.get(site, IDENTITY_2))
    return result


def embed_product(site_ops: Mapping[int, ArrayLike], num_sites: int) -> HermitianOperator:
    """
    Tensor product placing single-site operators on the given sites.

    Parameters
    ----------
    site_ops : Mapping[int, ArrayLike]
        2x2 Hermitian operators keyed by site; unlisted sites get the identity.
    num_sites : int
        Register size, 1..MAX_SITES.

    Returns
    -------
    HermitianOperator
        Operator of dimension ``2**num_sites``.
    """
    return HermitianOperator(kron_sites(site_ops, num_sites))


def embed_local(op: ArrayLike, site: int, num_sites: int) -> HermitianOperator:
    """Place a 2x2 operator on ``site`` of a ``num_sites`` register (identity elsewhere)."""
    return embed_product({site: op}, num_sites)


def eigh(h: HermitianOperator, check: bool = True) -> SpectralDecomposition:
    """
    Diagonalize a Hermitian operator.

    Parameters
    ----------
    h : HermitianOperator
        Operator to diagonalize.
    check : bool
        Verify eigenvector unitarity and reconstruction of ``h``.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues with column eigenvectors.

    Raises
    ------
    NumericalError
        If the eigensolver fails or the result violates the tolerances.
    """
    if not isinstance(h, HermitianOperator):
        h = HermitianOperator(h)
    try:
        values, vectors = scipy.linalg.eigh(h.entries)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed for dim {h.dim}: {exc}") from exc
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NumericalError(f"eigensolver returned non-finite values for dim {h.dim}")
    decomposition = SpectralDecomposition(values, vectors)
    if check:
        gram = vectors.conj().T @ vectors
        np.fill_diagonal(gram, gram.diagonal() - 1.0)
        unitarity = float(np.max(np.abs(gram)))
        if unitarity > UNITARITY_TOL:
            raise NumericalError(f"eigenvectors not unitary (defect {unitarity:.3e})")
        norm = float(np.linalg.norm(h.entries))
        error = float(np.linalg.norm(decomposition.reconstruct() - h.entries))
        if error > RECONSTRUCTION_TOL * (norm if norm > 0 else 1.0):
            raise NumericalError(f"spectral reconstruction error {error:.3e} (norm {norm:.3e})")
    logger.debug("Diagonalized operator of dim %d (width %.6g)", h.dim, decomposition.spectral_width)
    return decomposition


def boltzmann_populations(energies: np.ndarray, temperature: float) -> Tuple[np.ndarray, float]:
    """
    Gibbs populations computed from ground-shifted energies.

    Returns
    -------
    Tuple[np.ndarray, float]
        Populations summing to one, and the shifted partition sum
        ``sum(exp(-(E - E0) / T))``.
    """
    temperature = float(temperature)
    if not temperature > 0 or not np.isfinite(temperature):
        raise ConfigError(f"temperature must be positive and finite, got {temperature!r}")
    energies = np.asarray(energies, dtype=float)
    weights = np.exp(-(energies - energies.min()) / temperature)
    partition = float(weights.sum())
    populations = weights / partition
    if not (np.isfinite(partition) and np.all(np.isfinite(populations))):
        raise NumericalError(f"non-finite Gibbs weights at T={temperature!r}")
    return populations, partition


def thermal_state(spec: SpectralDecomposition, temperature: float) -> DensityMatrix:
    """Gibbs state ``exp(-H/T)/Z`` built in the eigenbasis of ``spec``."""
    populations, _ = boltzmann_populations(spec.eigenvalues, temperature)
    v = spec.eigenvectors
    rho = (v * populations) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def expectation(rho: DensityMatrix, obs: HermitianOperator) -> float:
    """Return ``tr(rho obs)`` as a real number."""
    r, o = _as_matrix(rho), _as_matrix(obs)
    if r.shape != o.shape:
        raise ConfigError(f"dimension mismatch: state {r.shape} vs observable {o.shape}")
    value = complex(np.einsum("ij,ji->", r, o))
    if abs(value.imag) > IMAGINARY_RESIDUE_TOL * max(1.0, abs(value.real)):
        raise NumericalError(f"expectation value has imaginary residue {value.imag:.3e}")
    return value.real


def partial_trace(
    rho: DensityMatrix, keep_sites: Iterable[int], num_sites: int
) -> DensityMatrix:
    """
    Reduced state on ``keep_sites``.

    The kept sites appear in ascending order in the result, whatever the order
    of ``keep_sites``.
    """
    keep = sorted(set(int(s) for s in keep_sites))
    if not keep:
        raise ConfigError("keep_sites must not be empty")
    if keep[0] < 0 or keep[-1] >= num_sites:
        raise ConfigError(f"keep_sites {keep} out of range for {num_sites} sites")
    if rho.dim != 2**num_sites:
        raise ConfigError(f"state of dim {rho.dim} does not describe {num_sites} qubits")
    if len(keep) == num_sites:
        return DensityMatrix(rho.entries.copy())
    letters = string.ascii_letters
    rows = [letters[s] for s in range(num_sites)]
    cols = [letters[num_sites + s] if s in keep else letters[s] for s in range(num_sites)]
    subscripts = (
        "".join(rows) + "".join(cols) + "->"
        + "".join(rows[s] for s in keep) + "".join(cols[s] for s in keep)
    )
    tensor = rho.entries.reshape((2,) * (2 * num_sites))
    reduced_dim = 2 ** len(keep)
    reduced = np.einsum(subscripts, tensor).reshape(reduced_dim, reduced_dim)
    return DensityMatrix(reduced)


def partial_transpose(rho: DensityMatrix, partition: Iterable[int]) -> np.ndarray:
    """Transpose the tensor factors listed in ``partition``."""
    num_sites = _num_sites_for_dim(rho.dim)
    sites = sorted(set(int(s) for s in partition))
    if not sites or len(sites) >= num_sites:
        raise ConfigError(f"partition {sites} is not a proper bipartition of {num_sites} sites")
    if sites[0] < 0 or sites[-1] >= num_sites:
        raise ConfigError(f"partition {sites} out of range for {num_sites} sites")
    perm = list(range(2 * num_sites))
    for s in sites:
        perm[s], perm[num_sites + s] = num_sites + s, s
    tensor = rho.entries.reshape((2,) * (2 * num_sites))
    return tensor.transpose(perm).reshape(rho.dim, rho.dim)


def negativity(rho: DensityMatrix, partition: Iterable[int]) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over ``partition``."""
    eigenvalues = scipy.linalg.eigvalsh(partial_transpose(rho, partition))
    return float(-eigenvalues[eigenvalues < 0].sum())


def wootters_value(rho: DensityMatrix) -> float:
    """Unclipped ``sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)`` of a two-qubit state."""
    if rho.dim != 4:
        raise ConfigError(f"concurrence needs a two-qubit state (dim 4), got dim {rho.dim}")
    yy = np.kron(PAULI_Y, PAULI_Y)
    r = rho.entries
    spin_flipped = yy @ r.conj() @ yy
    lambdas = np.sort(np.linalg.eigvals(r @ spin_flipped).real)[::-1]
    lambdas = np.where(lambdas < _WOOTTERS_FLOOR, 0.0, lambdas)
    roots = np.sqrt(lambdas)
    return float(roots[0] - roots[1:].sum())


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence ``max(0, wootters_value)``."""
    return max(0.0, wootters_value(rho))


def product_state_vector(bloch_vectors: np.ndarray) -> np.ndarray:
    """
    Pure product state with the given per-site Bloch vectors.

    Parameters
    ----------
    bloch_vectors : np.ndarray
        Array of shape (num_sites, 3) with unit rows (x, y, z).

    Returns
    -------
    np.ndarray
        Normalized state vector of length ``2**num_sites``.
    """
    vectors = np.asarray(bloch_vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[1] != 3:
        raise ConfigError(f"Bloch vectors must have shape (n, 3), got {vectors.shape}")
    state = np.ones(1, dtype=complex)
    for x, y, z in vectors:
        up = np.sqrt(max(0.0, (1.0 + z) / 2.0))
        if up > 0:
            down = complex(x, y) / (2.0 * up)
        else:
            down = 1.0
        state = np.kron(state, np.array([up, down], dtype=complex))
    return state / np.linalg.norm(state)
