"""
Expansion of an N-qubit state in the overcomplete basis of 6^N product projectors
P^s_i = (1 + s sigma_i)/2, i in 1..3, s = +-1.

Each qubit factor is converted with sigma_i = P_i - P'_i and 1 = omega (P_i + P'_i), omega = 1/3,
so the weight of the product projector with choices (i_k, s_k) is

    2^-N sum_{S subset of qubits} c_alpha(S) prod_{k in S} s_k prod_{k not in S} omega

where alpha(S) has i_k on the qubits in S and 0 elsewhere.
"""
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from sepscope import settings
from sepscope.densmat import BlochVector, DensityMatrix, PauliTensor, ProductEnsemble, PAULIS, pauli_expand
from sepscope.exceptions import InvalidStateError, NotACertificateError
from sepscope.utils import apply_per_axis, check_qubit_limit, local_pairs_to_matrix, mixing_threshold

logger = logging.getLogger(__name__)

OMEGA = 1 / 3

# per-qubit basis order: (1,+), (1,-), (2,+), (2,-), (3,+), (3,-)
AXIS_SIGNS: Tuple[Tuple[int, int], ...] = tuple((axis, sign) for axis in (1, 2, 3) for sign in (1, -1))

# weight of P^s_i for one qubit = 1/2 (omega c_0 + s c_i)
_TO_DISCRETE = np.array([
    [OMEGA / 2] + [sign / 2 if a == axis else 0.0 for a in (1, 2, 3)]
    for axis, sign in AXIS_SIGNS
])
# P^s_i[r, c] flattened as 2*r + c
_FROM_DISCRETE = np.array([
    [(PAULIS[0][r, c] + sign * PAULIS[axis][r, c]) / 2 for axis, sign in AXIS_SIGNS]
    for r in range(2) for c in range(2)
])

DiscreteIndex = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class DiscreteDecomposition:
    num_qubits: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.shape != (6,) * self.num_qubits:
            raise InvalidStateError(f'discrete weights must have shape {(6,) * self.num_qubits}, got {weights.shape}')
        total = float(weights.sum())
        if abs(total - 1) > settings.ENSEMBLE_SUM_TOL:
            raise InvalidStateError(f'discrete weights must sum to 1, got {total:.12g}')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @staticmethod
    def label(flat_index: Tuple[int, ...]) -> DiscreteIndex:
        return tuple(AXIS_SIGNS[i] for i in flat_index)

    def to_matrix(self) -> np.ndarray:
        pairs = apply_per_axis(self.weights.astype(complex), _FROM_DISCRETE)
        return local_pairs_to_matrix(pairs, self.num_qubits)


def discrete_decompose(t: PauliTensor) -> DiscreteDecomposition:
    check_qubit_limit(t.num_qubits, settings.MAX_DISCRETE_QUBITS, 'discrete_decompose')
    return DiscreteDecomposition(t.num_qubits, apply_per_axis(t.coeffs, _TO_DISCRETE))


def discrete_weight_formula_two_qubit(t: PauliTensor) -> np.ndarray:
    """
    The four two-qubit coefficient expressions written out term by term,
    indexed like DiscreteDecomposition.weights for N = 2.
    """
    if t.num_qubits != 2:
        raise InvalidStateError(f'two-qubit formula needs a 2-qubit tensor, got {t.num_qubits}')
    c = t.coeffs
    w = OMEGA
    out = np.empty((6, 6))
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            pp = (w * w + c[i, 0] * w + w * c[0, j] + c[i, j]) / 4
            mp = (w * w - c[i, 0] * w + w * c[0, j] - c[i, j]) / 4
            pm = (w * w + c[i, 0] * w - w * c[0, j] - c[i, j]) / 4
            mm = (w * w - c[i, 0] * w - w * c[0, j] + c[i, j]) / 4
            row, col = 2 * (i - 1), 2 * (j - 1)
            out[row, col] = pp
            out[row + 1, col] = mp
            out[row, col + 1] = pm
            out[row + 1, col + 1] = mm
    return out


def min_weight(d: DiscreteDecomposition) -> Tuple[float, DiscreteIndex]:
    """
    Minimum weight and the lexicographically smallest index attaining it.
    """
    # argmin returns the first occurrence in C order, i.e. the lexicographically smallest index
    flat = int(np.argmin(d.weights))
    index = tuple(int(i) for i in np.unravel_index(flat, d.weights.shape))
    return float(d.weights[index]), d.label(index)


def discrete_threshold(rho1: DensityMatrix) -> float:
    """
    Largest eps for which discrete_decompose(mix(eps, rho1)) has no negative weight.
    """
    d = discrete_decompose(pauli_expand(rho1))
    value, _ = min_weight(d)
    return mixing_threshold(6.0 ** -d.num_qubits, value)


def adversarial_tensor(n: int) -> PauliTensor:
    """
    All c_alpha = -1 except c_0...0 = 1. Not a state in general; it drives the
    weight of every all-plus product projector to its lowest possible value.
    """
    coeffs = -np.ones((4,) * n)
    coeffs[(0,) * n] = 1.0
    return PauliTensor(n, coeffs)


def worst_case_discrete_threshold(n: int) -> float:
    """
    1/(4^n - 1): the discrete threshold when every c_alpha takes its adversarial bound.
    A lower bound on discrete_threshold for every state, not a tight state-dependent constant.
    """
    if n < 1:
        raise InvalidStateError(f'number of qubits must be >= 1, got {n}')
    return 1 / (4 ** n - 1)


def ensemble_from_discrete(d: DiscreteDecomposition) -> ProductEnsemble:
    lowest = float(d.weights.min())
    if lowest < -settings.CERTIFICATE_NEG_TOL:
        raise NotACertificateError(
            f'discrete decomposition has negative weight {lowest:.6g}, it does not certify separability'
        )
    weights = np.clip(d.weights, 0.0, None)
    weights = weights / weights.sum()
    terms = []
    for flat_index in np.ndindex(*weights.shape):
        blochs = tuple(BlochVector.axis(axis, sign) for axis, sign in d.label(flat_index))
        terms.append((float(weights[flat_index]), blochs))
    return ProductEnsemble(tuple(terms))
