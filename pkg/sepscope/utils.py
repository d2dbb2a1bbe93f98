from typing import Optional, Sequence, Union

import numpy as np

from sepscope.exceptions import CapacityError


def check_qubit_limit(num_qubits: int, limit: int, what: str) -> None:
    if num_qubits > limit:
        raise CapacityError(f'{what} supports at most {limit} qubits, got {num_qubits}')


def apply_per_axis(tensor: np.ndarray, matrix: Union[np.ndarray, Sequence[np.ndarray]]) -> np.ndarray:
    """
    Given a tensor of shape (k,)*N and an (m, k) matrix (or one such matrix per axis),
    apply the matrix to every axis, left to right, and return a tensor of shape (m,)*N.

    The axis order is fixed, so the result is reproducible bit for bit.
    """
    out = tensor
    for axis in range(tensor.ndim):
        axis_matrix = matrix if isinstance(matrix, np.ndarray) and matrix.ndim == 2 else matrix[axis]
        out = np.moveaxis(np.tensordot(axis_matrix, out, axes=([1], [axis])), 0, axis)
    return out


def contract_axes(tensor: np.ndarray, vectors: Sequence[np.ndarray], skip: Optional[int] = None) -> np.ndarray:
    """
    Contract axis k of the tensor with vectors[k] for every k except `skip`.
    Returns a scalar array, or the vector left on the skipped axis.
    """
    out = tensor
    # last axis first, so the remaining axis indices stay valid
    for axis in reversed(range(tensor.ndim)):
        if axis == skip:
            continue
        out = np.tensordot(out, vectors[axis], axes=([axis], [0]))
    return out


def matrix_to_local_pairs(matrix: np.ndarray, num_qubits: int) -> np.ndarray:
    """
    Given a 2^N x 2^N matrix, return a tensor of shape (4,)*N
    whose axis k is the (row bit, column bit) pair of qubit k, flattened as 2*row + col.
    Qubit 0 is the leftmost tensor factor.
    """
    t = matrix.reshape((2,) * (2 * num_qubits))
    order = [ax for k in range(num_qubits) for ax in (k, num_qubits + k)]
    return t.transpose(order).reshape((4,) * num_qubits)


def local_pairs_to_matrix(tensor: np.ndarray, num_qubits: int) -> np.ndarray:
    d = 2 ** num_qubits
    t = tensor.reshape((2,) * (2 * num_qubits))
    order = list(range(0, 2 * num_qubits, 2)) + list(range(1, 2 * num_qubits, 2))
    return t.transpose(order).reshape(d, d)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for factor in factors:
        out = np.kron(out, factor)
    return out


def mixing_threshold(reference_weight: float, min_weight: float) -> float:
    """
    Largest eps for which (1 - eps) * reference_weight + eps * min_weight >= 0,
    where reference_weight > 0 is the weight the maximally mixed state gets in the same representation.
    """
    m = min(min_weight, 0.0)
    if m == 0:
        return 1.0
    return reference_weight / (reference_weight - m)
