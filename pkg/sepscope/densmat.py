"""
Density matrices of N qubits, their Pauli tensor expansion, canonical states and distances.

Conventions:
 - qubit 0 is the leftmost tensor factor (slowest-varying index of the d x d matrix)
 - basis kets |1>, |2> of the single-qubit textbook notation are |0>, |1> here
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from typing_extensions import Self

from sepscope import settings
from sepscope.exceptions import InvalidStateError, RangeError
from sepscope.utils import (
    apply_per_axis, check_qubit_limit, kron_all, local_pairs_to_matrix, matrix_to_local_pairs
)

logger = logging.getLogger(__name__)

PAULIS = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# c_alpha = tr(A sigma_alpha) = sum_rc A[r, c] sigma_alpha[c, r], per qubit
_EXPAND = np.array([[PAULIS[a][c, r] for r in range(2) for c in range(2)] for a in range(4)])
# A[r, c] = 1/2 sum_alpha c_alpha sigma_alpha[r, c], per qubit
_RECONSTRUCT = np.array([[PAULIS[a][r, c] for a in range(4)] for r in range(2) for c in range(2)]) / 2

MatrixLike = Union[np.ndarray, Sequence[Sequence[complex]]]
PauliIndex = Tuple[int, ...]


def _num_qubits_for_dim(dim: int) -> int:
    num_qubits = dim.bit_length() - 1
    if dim < 2 or 2 ** num_qubits != dim:
        raise InvalidStateError(f'matrix dimension must be a power of 2 (d = 2^N, N >= 1), got {dim}')
    return num_qubits


class DensityMatrix:
    """
    A d x d Hermitian, unit-trace, positive semidefinite matrix, d = 2^N.
    Entries are copied and made read-only, so instances are safe to share.

    `validate=False` skips the invariant checks; callers which may produce unphysical
    matrices (e.g. a Pauli reconstruction of an arbitrary tensor) call `validate()` themselves.
    """

    def __init__(self, entries: MatrixLike, validate: bool = True):
        matrix = np.array(entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidStateError(f'density matrix must be square, got shape {matrix.shape}')
        if not np.isfinite(matrix).all():
            raise InvalidStateError('density matrix entries must be finite numbers')
        self.num_qubits = _num_qubits_for_dim(matrix.shape[0])
        check_qubit_limit(self.num_qubits, settings.MAX_DENSE_QUBITS, 'DensityMatrix')
        matrix.setflags(write=False)
        self.entries = matrix
        if validate:
            self.validate()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self) -> Self:
        hermitian_error = float(np.max(np.abs(self.entries - self.entries.conj().T)))
        if hermitian_error > settings.HERMITIAN_TOL:
            raise InvalidStateError(f'density matrix is not Hermitian (max deviation {hermitian_error:.3e})')
        trace = complex(np.trace(self.entries))
        if abs(trace - 1) > settings.TRACE_TOL:
            raise InvalidStateError(f'density matrix does not have unit trace (trace = {trace.real:.12g})')
        if self.min_eigenvalue < -settings.PSD_TOL:
            raise InvalidStateError(
                f'density matrix is not positive semidefinite (min eigenvalue {self.min_eigenvalue:.3e})'
            )
        return self

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def is_physical(self) -> bool:
        return self.min_eigenvalue >= -settings.PSD_TOL

    def __repr__(self) -> str:
        return f'DensityMatrix(num_qubits={self.num_qubits})'


@dataclass(frozen=True, eq=False)
class PauliTensor:
    """
    Real coefficients c[alpha_1, ..., alpha_N] = tr(rho sigma_alpha_1 x ... x sigma_alpha_N),
    stored as an array of shape (4,)*N.
    """
    num_qubits: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.shape != (4,) * self.num_qubits:
            raise InvalidStateError(
                f'Pauli tensor for {self.num_qubits} qubits must have shape {(4,) * self.num_qubits}, '
                f'got {coeffs.shape}'
            )
        if not np.isfinite(coeffs).all():
            raise InvalidStateError('Pauli coefficients must be finite numbers')
        identity_coeff = coeffs[(0,) * self.num_qubits]
        if abs(identity_coeff - 1) > settings.TRACE_TOL:
            raise InvalidStateError(f'Pauli tensor normalization requires c[0...0] = 1, got {identity_coeff:.12g}')
        largest = float(np.max(np.abs(coeffs)))
        if largest > 1 + settings.TRACE_TOL:
            raise InvalidStateError(f'Pauli coefficients must satisfy |c| <= 1, got {largest:.12g}')
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def from_terms(cls, num_qubits: int, terms: Sequence[Tuple[PauliIndex, float]]) -> Self:
        """
        Omitted terms are zero; the identity term defaults to 1.
        """
        check_qubit_limit(num_qubits, settings.MAX_PAULI_QUBITS, 'PauliTensor')
        coeffs = np.zeros((4,) * num_qubits)
        coeffs[(0,) * num_qubits] = 1.0
        for indices, value in terms:
            indices = tuple(indices)
            valid = all(isinstance(i, (int, np.integer)) and not isinstance(i, bool) and 0 <= i <= 3 for i in indices)
            if len(indices) != num_qubits or not valid:
                raise InvalidStateError(f'Pauli term indices must be {num_qubits} integers in 0..3, got {list(indices)}')
            coeffs[indices] = value
        return cls(num_qubits, coeffs)

    def nonzero_terms(self, tol: float = 1e-12) -> List[Tuple[PauliIndex, float]]:
        """Nonzero coefficients, sorted by index."""
        return [
            (tuple(int(i) for i in index), float(self.coeffs[index]))
            for index in zip(*np.nonzero(np.abs(self.coeffs) > tol))
        ]


@dataclass(frozen=True)
class BlochVector:
    """
    Unit vector n on the Bloch sphere, i.e. the pure state (1 + n.sigma)/2.
    The extended component n_0 = 1/3 is implied, see `extended`.
    """
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)
        if not abs(norm - 1) <= settings.BLOCH_NORM_TOL:
            raise InvalidStateError(f'Bloch vector must have unit norm, got |n| = {norm:.15g}')

    @classmethod
    def from_array(cls, vector: Sequence[float]) -> Self:
        return cls(float(vector[0]), float(vector[1]), float(vector[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> Self:
        """theta is the colatitude in [0, pi], phi the azimuth."""
        return cls(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))

    @classmethod
    def axis(cls, axis: int, sign: int) -> Self:
        """+-e_axis, axis in 1..3"""
        vector = [0.0, 0.0, 0.0]
        vector[axis - 1] = float(sign)
        return cls(*vector)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def extended(self) -> np.ndarray:
        return np.array([1 / 3, self.x, self.y, self.z])

    def angles(self) -> Tuple[float, float]:
        theta = math.acos(max(-1.0, min(1.0, self.z)))
        phi = math.atan2(self.y, self.x) % (2 * math.pi)
        return theta, phi

    def projector(self) -> np.ndarray:
        return (PAULIS[0] + self.x * PAULIS[1] + self.y * PAULIS[2] + self.z * PAULIS[3]) / 2


def product_projector(blochs: Sequence[BlochVector]) -> np.ndarray:
    return kron_all([b.projector() for b in blochs])


@dataclass(frozen=True)
class ProductEnsemble:
    """
    A mixture sum_j w_j P_{n_j1} x ... x P_{n_jN} of pure product states.
    A valid instance is a separability certificate for the state it reconstructs.
    """
    terms: Tuple[Tuple[float, Tuple[BlochVector, ...]], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidStateError('product ensemble must have at least one term')
        sizes = {len(blochs) for _, blochs in self.terms}
        if len(sizes) != 1:
            raise InvalidStateError(f'every ensemble term must cover the same qubits, got sizes {sorted(sizes)}')
        weights = [w for w, _ in self.terms]
        if not np.isfinite(weights).all():
            raise InvalidStateError('ensemble weights must be finite numbers')
        if min(weights) < 0:
            raise InvalidStateError('ensemble weights must be nonnegative')
        total = sum(weights)
        if abs(total - 1) > settings.ENSEMBLE_SUM_TOL:
            raise InvalidStateError(f'ensemble weights must sum to 1, got {total:.12g}')

    @property
    def num_qubits(self) -> int:
        return len(self.terms[0][1])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms])

    def to_matrix(self) -> np.ndarray:
        matrix = np.zeros((2 ** self.num_qubits,) * 2, dtype=complex)
        for weight, blochs in self.terms:
            if weight:
                matrix += weight * product_projector(blochs)
        return matrix

    def to_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.to_matrix())

    def reconstruction_error(self, rho: DensityMatrix) -> float:
        return float(np.max(np.abs(self.to_matrix() - rho.entries)))

    def certifies(self, rho: DensityMatrix, tol: Optional[float] = None) -> bool:
        tol = settings.RECONSTRUCTION_TOL if tol is None else tol
        return self.num_qubits == rho.num_qubits and self.reconstruction_error(rho) <= tol


def _as_density_matrix(rho: Union[DensityMatrix, MatrixLike]) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def pauli_expand(rho: Union[DensityMatrix, MatrixLike]) -> PauliTensor:
    """
    c_alpha = tr(rho sigma_alpha_1 x ... x sigma_alpha_N), evaluated with one 4-point
    transform per qubit instead of 4^N full traces.
    """
    rho = _as_density_matrix(rho)
    check_qubit_limit(rho.num_qubits, settings.MAX_PAULI_QUBITS, 'pauli_expand')
    pairs = matrix_to_local_pairs(rho.entries, rho.num_qubits)
    coeffs = apply_per_axis(pairs, _EXPAND)
    return PauliTensor(rho.num_qubits, coeffs.real)


def pauli_reconstruct(t: PauliTensor, allow_unphysical: bool = False) -> DensityMatrix:
    """
    rho = 2^-N sum_alpha c_alpha sigma_alpha_1 x ... x sigma_alpha_N.

    A tensor which does not describe a positive semidefinite matrix raises InvalidStateError,
    unless allow_unphysical is set, in which case it is logged and returned unvalidated.
    """
    check_qubit_limit(t.num_qubits, settings.MAX_DENSE_QUBITS, 'pauli_reconstruct')
    pairs = apply_per_axis(t.coeffs.astype(complex), _RECONSTRUCT)
    rho = DensityMatrix(local_pairs_to_matrix(pairs, t.num_qubits), validate=False)
    if not rho.is_physical:
        if not allow_unphysical:
            raise InvalidStateError(
                f'Pauli tensor does not describe a density matrix: '
                f'not positive semidefinite (min eigenvalue {rho.min_eigenvalue:.3e})'
            )
        logger.warning('accepting unphysical reconstruction, min eigenvalue %.3e', rho.min_eigenvalue)
    return rho


def make_mixed(n: int) -> DensityMatrix:
    """M_d = 1_d / d for d = 2^n"""
    if n < 1:
        raise RangeError(f'number of qubits must be >= 1, got {n}')
    d = 2 ** n
    return DensityMatrix(np.eye(d) / d, validate=False)


def _pure(vector: np.ndarray) -> DensityMatrix:
    vector = vector / np.linalg.norm(vector)
    return DensityMatrix(np.outer(vector, vector.conj()), validate=False)


def make_ghz(n: int = 3) -> DensityMatrix:
    """(|0...0> + |1...1>)/sqrt(2)"""
    if n < 2:
        raise RangeError(f'GHZ state needs at least 2 qubits, got {n}')
    vector = np.zeros(2 ** n, dtype=complex)
    vector[0] = vector[-1] = 1
    return _pure(vector)


def make_max_entangled(d: int) -> DensityMatrix:
    """
    |psi> = d^-1/2 sum_k |k>|k> for two aggregate particles of dimension d,
    i.e. a state of 2*log2(d) qubits.
    """
    if d < 2 or d & (d - 1):
        raise RangeError(f'aggregate particle dimension must be a power of 2, got {d}')
    vector = np.zeros(d * d, dtype=complex)
    vector[np.arange(d) * (d + 1)] = 1
    return _pure(vector)


def make_bell() -> DensityMatrix:
    return make_max_entangled(2)


def mix(eps: float, rho1: DensityMatrix) -> DensityMatrix:
    """rho_eps = (1 - eps) M_d + eps rho1"""
    if not 0 <= eps <= 1:
        raise RangeError(f'eps must lie in [0, 1], got {eps}')
    d = rho1.dim
    return DensityMatrix((1 - eps) * np.eye(d) / d + eps * rho1.entries, validate=False)


def delta_distance(rho: DensityMatrix) -> float:
    """sqrt(tr((rho - M_d)^2))"""
    diff = rho.entries - np.eye(rho.dim) / rho.dim
    return float(np.linalg.norm(diff, 'fro'))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.vdot(rho.entries, rho.entries)))


def random_density_matrix(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """
    Hilbert-Schmidt random state: G G^dagger / tr, G a d x rank complex Ginibre matrix.
    """
    d = 2 ** n
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    matrix = g @ g.conj().T
    matrix = (matrix + matrix.conj().T) / 2
    return DensityMatrix(matrix / np.trace(matrix).real)
