"""
The continuous product representation

    rho = integral dOmega_1 ... dOmega_N  w(n_1, ..., n_N)  P_n1 x ... x P_nN

with the unique weight function that has only l = 0 and l = 1 spherical-harmonic content:

    w = (3/4pi)^N c_alpha1...alphaN (n_1)_alpha1 ... (n_N)_alphaN,  n_0 = 1/3
      = (4pi)^-N tr(rho (1 + 3 n_1.sigma) x ... x (1 + 3 n_N.sigma))

w is multilinear in the extended vectors (1/3, n_k), which the minimizer exploits:
for fixed other qubits the best n_k is the unit vector opposing its effective field.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from sepscope import settings
from sepscope.densmat import BlochVector, DensityMatrix, PauliTensor, PAULIS
from sepscope.exceptions import RangeError
from sepscope.utils import check_qubit_limit, contract_axes, kron_all, mixing_threshold

logger = logging.getLogger(__name__)

FOUR_PI = 4 * math.pi


def _scale(n: int) -> float:
    return (3 / FOUR_PI) ** n


def _extended(vectors: np.ndarray) -> List[np.ndarray]:
    return [np.concatenate(([1 / 3], v)) for v in vectors]


def weight_at(t: PauliTensor, blochs: Sequence[BlochVector]) -> float:
    if len(blochs) != t.num_qubits:
        raise RangeError(f'need {t.num_qubits} Bloch vectors, got {len(blochs)}')
    return _scale(t.num_qubits) * float(contract_axes(t.coeffs, [b.extended() for b in blochs]))


def weight_at_trace(rho: DensityMatrix, blochs: Sequence[BlochVector]) -> float:
    """Same value as weight_at, evaluated as a trace against the operator product."""
    if len(blochs) != rho.num_qubits:
        raise RangeError(f'need {rho.num_qubits} Bloch vectors, got {len(blochs)}')
    factors = [PAULIS[0] + 3 * (b.x * PAULIS[1] + b.y * PAULIS[2] + b.z * PAULIS[3]) for b in blochs]
    operator = kron_all(factors)
    return float(np.real(np.sum(rho.entries * operator.T))) / FOUR_PI ** rho.num_qubits


def weight_floor(n: int) -> float:
    """
    Each factor 1 + 3 n.sigma has eigenvalues 4 and -2,
    so the operator product bottoms out at 4^(n-1) * (-2) = -2^(2n-1).
    """
    if n < 1:
        raise RangeError(f'number of qubits must be >= 1, got {n}')
    return -(2 ** (2 * n - 1)) / FOUR_PI ** n


def ghz_weight_closed_form(theta: Sequence[float], phi: Sequence[float]) -> float:
    c = [math.cos(x) for x in theta]
    s = [math.sin(x) for x in theta]
    bracket = (
        1
        + 9 * (c[0] * c[1] + c[1] * c[2] + c[0] * c[2])
        + 27 * s[0] * s[1] * s[2] * math.cos(phi[0] + phi[1] + phi[2])
    )
    return bracket / FOUR_PI ** 3


def continuous_threshold(t: PauliTensor, wmin: float) -> float:
    """
    Largest eps for which w_eps = (1 - eps)(4pi)^-N + eps * wmin stays nonnegative.
    """
    return _threshold_for(t.num_qubits, wmin)


def floor_threshold(n: int) -> float:
    """
    continuous_threshold at the analytic floor, 1/(1 + 2^(2n-1)); needs only n, not a tensor.
    """
    return _threshold_for(n, weight_floor(n))


def _threshold_for(n: int, wmin: float) -> float:
    reference = FOUR_PI ** -n
    if wmin > reference * (1 + 1e-12):
        raise RangeError(f'minimum weight {wmin:.6g} exceeds the maximally mixed weight {reference:.6g}')
    return mixing_threshold(reference, wmin)


def delta_ball_radius(n: int) -> float:
    """(2 sqrt 5)^-n; every state with delta-distance at most this is separable."""
    if n < 1:
        raise RangeError(f'number of qubits must be >= 1, got {n}')
    return 20.0 ** (-n / 2)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _coordinate_descent(coeffs: np.ndarray, vectors: np.ndarray, sweeps: int) -> Tuple[float, np.ndarray]:
    n = coeffs.ndim
    scale = _scale(n)
    value = scale * float(contract_axes(coeffs, _extended(vectors)))
    for _ in range(sweeps):
        previous = value
        for k in range(n):
            g = contract_axes(coeffs, _extended(vectors), skip=k)
            field = g[1:]
            norm = float(np.linalg.norm(field))
            if norm > 0:
                vectors[k] = -field / norm
            value = scale * (g[0] / 3 - norm)
        if previous - value <= 1e-16 * max(1.0, abs(value)):
            break
    return value, vectors


def _angles_to_vectors(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles[0::2], angles[1::2]
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)


def _weight_and_gradient(angles: np.ndarray, coeffs: np.ndarray) -> Tuple[float, np.ndarray]:
    n = coeffs.ndim
    scale = _scale(n)
    vectors = _angles_to_vectors(angles)
    extended = _extended(vectors)
    value = scale * float(contract_axes(coeffs, extended))
    grad = np.empty_like(angles)
    for k in range(n):
        field = contract_axes(coeffs, extended, skip=k)[1:]
        theta, phi = angles[2 * k], angles[2 * k + 1]
        d_theta = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
        d_phi = np.array([-math.sin(theta) * math.sin(phi), math.sin(theta) * math.cos(phi), 0.0])
        grad[2 * k] = scale * float(field @ d_theta)
        grad[2 * k + 1] = scale * float(field @ d_phi)
    return value, grad


def _vectors_to_angles(vectors: np.ndarray) -> np.ndarray:
    angles = np.empty(2 * len(vectors))
    angles[0::2] = np.arccos(np.clip(vectors[:, 2], -1.0, 1.0))
    angles[1::2] = np.arctan2(vectors[:, 1], vectors[:, 0])
    return angles


def _minimize_from(coeffs: np.ndarray, rng: np.random.Generator, sweeps: int) -> Tuple[float, np.ndarray]:
    n = coeffs.ndim
    vectors = np.array([_unit(rng.standard_normal(3)) for _ in range(n)])
    value, vectors = _coordinate_descent(coeffs, vectors, sweeps)

    # gradient polish on the 2N angles; kept only when it improves
    polished = minimize(_weight_and_gradient, _vectors_to_angles(vectors), args=(coeffs,), jac=True,
                        method='L-BFGS-B', options={'gtol': 1e-14, 'ftol': 1e-16, 'maxiter': 200})
    if polished.fun < value:
        value, vectors = float(polished.fun), _angles_to_vectors(polished.x)
    return value, np.array([_unit(v) for v in vectors])


def minimize_weight(t: PauliTensor,
                    starts: int = settings.DEFAULT_WEIGHT_STARTS,
                    seed: int = settings.DEFAULT_SEED,
                    sweeps: int = settings.DEFAULT_WEIGHT_SWEEPS) -> Tuple[float, List[BlochVector]]:
    """
    Multi-start search for the minimum of w over N Bloch spheres.

    Each start runs exact per-qubit block descent (monotone) and then an L-BFGS polish on the angles.
    Start k draws from child k of SeedSequence(seed), so results do not depend on the thread count;
    ties between starts go to the lowest start index.

    The result is a best-effort minimum, i.e. an upper estimate of the true minimum.
    """
    check_qubit_limit(t.num_qubits, settings.MAX_WEIGHT_MINIMIZE_QUBITS, 'minimize_weight')
    if starts < 1:
        raise RangeError(f'starts must be >= 1, got {starts}')
    generators = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(starts)]
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        results = list(pool.map(lambda rng: _minimize_from(t.coeffs, rng, sweeps), generators))

    best_index = 0
    for index, (value, _) in enumerate(results):
        logger.debug('minimize_weight start %d: %.15g', index, value)
        if value < results[best_index][0]:
            best_index = index
    value, vectors = results[best_index]
    return value, [BlochVector.from_array(v) for v in vectors]


def state_continuous_threshold(t: PauliTensor,
                               starts: int = settings.DEFAULT_WEIGHT_STARTS,
                               seed: int = settings.DEFAULT_SEED) -> float:
    wmin, _ = minimize_weight(t, starts=starts, seed=seed)
    return continuous_threshold(t, wmin)
