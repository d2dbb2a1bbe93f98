"""
Linearly independent 4^N product representation on the vertices of one regular tetrahedron per qubit:

    rho = sum_{v_1..v_N} W(v_1, ..., v_N) P_n(v_1) x ... x P_n(v_N)
    W = 4^-N tr(rho (1 + 3 n(v_1).sigma) x ... x (1 + 3 n(v_N).sigma))

The four vertices reproduce the l = 0, 1 moments of the sphere exactly
(sum n_v = 0, sum n_v n_v^T = 4/3), which is what makes the reconstruction exact.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation
from typing_extensions import Self

from sepscope import settings
from sepscope.densmat import BlochVector, DensityMatrix, PauliTensor, ProductEnsemble, PAULIS, pauli_expand
from sepscope.exceptions import FrameError, InvalidStateError, NotACertificateError, RangeError
from sepscope.utils import apply_per_axis, check_qubit_limit, local_pairs_to_matrix, mixing_threshold

logger = logging.getLogger(__name__)

DEFAULT_VERTICES = np.array([
    [1, 1, 1],
    [1, -1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
]) / math.sqrt(3)

# vertex 0 on +z, the others on the circle z = -1/3 at azimuths 0, 120 and 240 degrees
POLAR_VERTICES = np.array([[0.0, 0.0, 1.0]] + [
    [math.sqrt(8) / 3 * math.cos(psi), math.sqrt(8) / 3 * math.sin(psi), -1 / 3]
    for psi in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
])


@dataclass(frozen=True)
class Tetrahedron:
    vertices: Tuple[BlochVector, BlochVector, BlochVector, BlochVector]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise FrameError(f'a tetrahedron has 4 vertices, got {len(self.vertices)}')
        m = self.matrix
        centroid_error = float(np.max(np.abs(m.sum(axis=0))))
        if centroid_error > settings.FRAME_TOL:
            raise FrameError(f'tetrahedron vertices must sum to zero (deviation {centroid_error:.3e})')
        frame_error = float(np.max(np.abs(m.T @ m - 4 / 3 * np.eye(3))))
        if frame_error > settings.FRAME_TOL:
            raise FrameError(f'tetrahedron vertices must satisfy sum n n^T = 4/3 (deviation {frame_error:.3e})')

    @classmethod
    def from_array(cls, vertices: np.ndarray) -> Self:
        return cls(tuple(BlochVector.from_array(v / np.linalg.norm(v)) for v in vertices))

    @classmethod
    def default(cls) -> Self:
        return cls.from_array(DEFAULT_VERTICES)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([v.vector for v in self.vertices])

    def rotated(self, rotation: Rotation) -> Self:
        return self.from_array(rotation.apply(self.matrix))


def _weight_matrix(vertices: np.ndarray) -> np.ndarray:
    """(vertex, alpha) -> (1, 3 n_v) / 4"""
    return np.hstack([np.ones((4, 1)), 3 * vertices]) / 4


def _projector_matrix(vertices: np.ndarray) -> np.ndarray:
    """(2*r + c, vertex) -> P_n(v)[r, c]"""
    projectors = [(PAULIS[0] + sum(v[i] * PAULIS[i + 1] for i in range(3))) / 2 for v in vertices]
    return np.array([[p[r, c] for p in projectors] for r in range(2) for c in range(2)])


@dataclass(frozen=True, eq=False)
class TetrahedralDecomposition:
    num_qubits: int
    tetrahedra: Tuple[Tetrahedron, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.shape != (4,) * self.num_qubits or len(self.tetrahedra) != self.num_qubits:
            raise InvalidStateError(f'tetrahedral decomposition of {self.num_qubits} qubits needs '
                                    f'{self.num_qubits} tetrahedra and weights of shape {(4,) * self.num_qubits}')
        total = float(weights.sum())
        if abs(total - 1) > settings.ENSEMBLE_SUM_TOL:
            raise InvalidStateError(f'tetrahedral weights must sum to 1, got {total:.12g}')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @property
    def min_weight(self) -> float:
        return float(self.weights.min())

    def to_matrix(self) -> np.ndarray:
        pairs = apply_per_axis(self.weights.astype(complex), [_projector_matrix(t.matrix) for t in self.tetrahedra])
        return local_pairs_to_matrix(pairs, self.num_qubits)


def _weights(coeffs: np.ndarray, vertex_sets: Sequence[np.ndarray]) -> np.ndarray:
    return apply_per_axis(coeffs, [_weight_matrix(v) for v in vertex_sets])


def tetrahedral_decompose(t: PauliTensor, tets: Sequence[Tetrahedron]) -> TetrahedralDecomposition:
    if len(tets) != t.num_qubits:
        raise FrameError(f'need one tetrahedron per qubit ({t.num_qubits}), got {len(tets)}')
    for tet in tets:
        if not isinstance(tet, Tetrahedron):
            raise FrameError(f'expected Tetrahedron, got {type(tet).__name__}')
    weights = _weights(t.coeffs, [tet.matrix for tet in tets])
    return TetrahedralDecomposition(t.num_qubits, tuple(tets), weights)


def tetrahedral_threshold(t: PauliTensor, tets: Sequence[Tetrahedron]) -> float:
    return mixing_threshold(4.0 ** -t.num_qubits, tetrahedral_decompose(t, tets).min_weight)


def ensemble_from_tetrahedral(d: TetrahedralDecomposition) -> ProductEnsemble:
    if d.min_weight < -settings.CERTIFICATE_NEG_TOL:
        raise NotACertificateError(
            f'tetrahedral decomposition has negative weight {d.min_weight:.6g}, it does not certify separability'
        )
    weights = np.clip(d.weights, 0.0, None)
    weights = weights / weights.sum()
    terms = []
    for index in np.ndindex(*weights.shape):
        blochs = tuple(tet.vertices[v] for tet, v in zip(d.tetrahedra, index))
        terms.append((float(weights[index]), blochs))
    return ProductEnsemble(tuple(terms))


def _random_rotvecs(n: int, rng: np.random.Generator) -> np.ndarray:
    # a normalized Gaussian 4-vector is a uniformly random unit quaternion
    quats = rng.standard_normal((n, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    return Rotation.from_quat(quats).as_rotvec()


_POLAR_ROTVEC = Rotation.align_vectors(POLAR_VERTICES, DEFAULT_VERTICES)[0].as_rotvec()


def _vertex_sets(params: np.ndarray, n: int) -> List[np.ndarray]:
    rotations = Rotation.from_rotvec(params.reshape(n, 3))
    return [rotations[k].apply(DEFAULT_VERTICES) for k in range(n)]


def _search_from(coeffs: np.ndarray, start: np.ndarray, budget: int) -> Tuple[float, np.ndarray]:
    """
    Maximize the smallest tetrahedral weight over the per-qubit rotation vectors,
    as the smooth epigraph problem: max s subject to W_j(params) >= s for every vertex tuple j.
    """
    n = coeffs.ndim

    def lowest(params: np.ndarray) -> float:
        return float(_weights(coeffs, _vertex_sets(params, n)).min())

    best_value, best_params = lowest(start), start
    x0 = np.append(start, best_value)
    result = minimize(
        lambda x: -x[-1],
        x0,
        jac=lambda x: np.append(np.zeros(len(x) - 1), -1.0),
        method='SLSQP',
        constraints=[{'type': 'ineq', 'fun': lambda x: _weights(coeffs, _vertex_sets(x[:-1], n)).ravel() - x[-1]}],
        options={'maxiter': budget, 'ftol': 1e-12},
    )
    value = lowest(result.x[:-1])
    if value > best_value:
        best_value, best_params = value, result.x[:-1]
    return best_value, best_params


def optimize_tetrahedra(rho1: DensityMatrix,
                        budget: int = settings.DEFAULT_TETRA_BUDGET,
                        seed: int = settings.DEFAULT_SEED,
                        starts: int = settings.DEFAULT_TETRA_STARTS,
                        trace: Optional[List[float]] = None) -> Tuple[List[Tetrahedron], float]:
    """
    Rotate each qubit's tetrahedron to maximize eps* = 4^-N / (4^-N - m),
    m the smallest tetrahedral weight of rho1.

    Start 0 is the default orientation and start 1 the polar one (a vertex on each local z axis),
    the rest are uniformly random rotations from SeedSequence(seed).
    Every start is refined by SLSQP with `budget` iterations and the best is polished once more.
    The best threshold so far after each start is appended to `trace`, which is therefore non-decreasing.
    """
    n = rho1.num_qubits
    check_qubit_limit(n, settings.MAX_TETRA_OPTIMIZE_QUBITS, 'optimize_tetrahedra')
    if starts < 1 or budget < 1:
        raise RangeError(f'starts and budget must be >= 1, got {starts} and {budget}')
    coeffs = pauli_expand(rho1).coeffs
    reference = 4.0 ** -n

    start_params = [np.zeros(3 * n), np.tile(_POLAR_ROTVEC, n)][:starts]
    for child in np.random.SeedSequence(seed).spawn(max(starts - 2, 0)):
        start_params.append(_random_rotvecs(n, np.random.default_rng(child)).ravel())

    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        results = list(pool.map(lambda start: _search_from(coeffs, start, budget), start_params))

    best_index = 0
    for index, (value, _) in enumerate(results):
        if value > results[best_index][0]:
            best_index = index
        logger.debug('optimize_tetrahedra start %d: min weight %.15g', index, value)
        if trace is not None:
            trace.append(mixing_threshold(reference, results[best_index][0]))

    best_value, best_params = _search_from(coeffs, results[best_index][1], budget)
    tets = [Tetrahedron.from_array(v) for v in _vertex_sets(best_params, n)]
    threshold = mixing_threshold(reference, best_value)
    if trace is not None:
        trace.append(threshold)
    return tets, threshold
