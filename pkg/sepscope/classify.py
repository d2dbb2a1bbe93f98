import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from sepscope import settings
from sepscope.continuum import delta_ball_radius, floor_threshold, state_continuous_threshold
from sepscope.densmat import BlochVector, DensityMatrix, ProductEnsemble, delta_distance, mix, pauli_expand
from sepscope.discrete import discrete_decompose, discrete_threshold, ensemble_from_discrete
from sepscope.exceptions import InvalidStateError
from sepscope.frontier import (
    all_bipartitions, local_projection, lower_bound, lower_bound_prior, ppt_min_eigenvalue, upper_bound
)
from sepscope.tetrahedral import Tetrahedron, ensemble_from_tetrahedral, optimize_tetrahedra, tetrahedral_decompose

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    SEPARABLE = 'separable-certified'
    ENTANGLED = 'entangled-certified'
    UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class Thresholds:
    discrete: float
    continuous_floor: float
    continuous_state: Optional[float] = None
    tetrahedral: Optional[float] = None


@dataclass(frozen=True)
class Bounds:
    lower: float
    delta_ball: float
    lower_prior: Optional[float] = None
    upper: Optional[float] = None


@dataclass(frozen=True)
class Witness:
    """Negative partial transpose over second_group, of the state itself or of its two-qubit local projection."""
    second_group: Tuple[int, ...]
    min_eigenvalue: float
    subject: str = 'state'

    @property
    def description(self) -> str:
        return (f'partial transpose of the {self.subject} over qubits {list(self.second_group)} '
                f'has eigenvalue {self.min_eigenvalue:.6g} < 0')


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    num_qubits: int
    epsilon: float
    delta: float
    thresholds: Thresholds
    bounds: Bounds
    verdict: Verdict
    certificate: Optional[ProductEnsemble] = None
    certificate_source: Optional[str] = None
    witness: Optional[Witness] = None
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict is Verdict.SEPARABLE and self.certificate is None:
            raise InvalidStateError('a separable-certified report needs a certificate ensemble')
        if self.verdict is Verdict.ENTANGLED and self.witness is None:
            raise InvalidStateError('an entangled-certified report needs a witness')
        if self.bounds.upper is not None and self.bounds.lower > self.bounds.upper:
            raise InvalidStateError('lower bound exceeds upper bound')


@dataclass
class ClassifyOptions:
    """
    seed feeds every optimizer; set weight_starts or tetra_starts to 0 to skip that search.
    """
    seed: int = settings.DEFAULT_SEED
    weight_starts: int = settings.DEFAULT_WEIGHT_STARTS
    tetra_starts: int = settings.DEFAULT_TETRA_STARTS
    tetra_budget: int = settings.DEFAULT_TETRA_BUDGET


def _certificate(state: DensityMatrix, attempts: List[Tuple[str, object]]) -> Tuple[Optional[ProductEnsemble], Optional[str]]:
    for source, decomposition in attempts:
        lowest = float(decomposition.weights.min())
        logger.debug('%s decomposition: min weight %.6g', source, lowest)
        if not lowest >= -settings.CERTIFICATE_NEG_TOL:
            continue
        error = float(np.max(np.abs(decomposition.to_matrix() - state.entries)))
        if error > settings.RECONSTRUCTION_TOL:
            logger.warning('%s decomposition is nonnegative but misses the state by %.3e', source, error)
            continue
        if source == 'discrete':
            return ensemble_from_discrete(decomposition), source
        return ensemble_from_tetrahedral(decomposition), source
    return None, None


def _single_qubit_certificate(state: DensityMatrix) -> ProductEnsemble:
    """rho = (1 + r.sigma)/2 = (1 + |r|)/2 P_n + (1 - |r|)/2 P_-n with n = r/|r|."""
    r = pauli_expand(state).coeffs[1:]
    length = float(np.linalg.norm(r))
    axis = BlochVector.axis(3, 1) if length < settings.BLOCH_NORM_TOL else BlochVector.from_array(r / length)
    opposite = BlochVector(-axis.x, -axis.y, -axis.z)
    length = min(length, 1.0)
    return ProductEnsemble((((1 + length) / 2, (axis,)), ((1 - length) / 2, (opposite,))))


def _ppt_witness(state: DensityMatrix) -> Tuple[Optional[Witness], Optional[float]]:
    """
    Even n: the two-qubit local projection is checked first, it is one 4 x 4 eigenproblem.
    Then every bipartition; the most negative cut wins, ties go to the first cut.
    """
    n = state.num_qubits
    if n % 2 == 0 and n > 2:
        projected = local_projection(state)
        if projected is not None:
            value = ppt_min_eigenvalue(projected, [1])
            if value < -settings.PPT_TOL:
                half = tuple(range(n // 2, n))
                return Witness(half, value, subject='local projection'), value

    cuts = all_bipartitions(n)
    if not cuts:
        return None, None
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        values = list(pool.map(lambda cut: ppt_min_eigenvalue(state, cut), cuts))
    best = int(np.argmin(values))
    if values[best] < -settings.PPT_TOL:
        return Witness(cuts[best].second, values[best]), values[best]
    return None, values[best]


def classify(rho1: DensityMatrix, eps: float, options: Optional[ClassifyOptions] = None) -> SeparabilityReport:
    """
    Classify rho_eps = (1 - eps) M_d + eps rho1.

    Certificates are tried in order: discrete 6^N decomposition, tetrahedral decomposition with the
    default orientation, then with orientations optimized for rho1. The first nonnegative one wins.
    A single qubit always gets its two-term Bloch decomposition.
    Otherwise the partial transpose is checked, on the local projection for even n and then
    across every bipartition.
    """
    options = options or ClassifyOptions()
    n = rho1.num_qubits
    state = mix(eps, rho1)
    t1 = pauli_expand(rho1)
    t = pauli_expand(state)

    continuous_state = None
    if options.weight_starts > 0 and n <= settings.MAX_WEIGHT_MINIMIZE_QUBITS:
        continuous_state = state_continuous_threshold(t1, starts=options.weight_starts, seed=options.seed)

    attempts: List[Tuple[str, object]] = [
        ('discrete', discrete_decompose(t)),
        ('tetrahedral-default', tetrahedral_decompose(t, [Tetrahedron.default()] * n)),
    ]
    tetrahedral = None
    if options.tetra_starts > 0 and n <= settings.MAX_TETRA_OPTIMIZE_QUBITS:
        tets, tetrahedral = optimize_tetrahedra(rho1, budget=options.tetra_budget, seed=options.seed,
                                                starts=options.tetra_starts)
        attempts.append(('tetrahedral-optimized', tetrahedral_decompose(t, tets)))

    certificate, source = _certificate(state, attempts)
    if certificate is None and n == 1:
        certificate, source = _single_qubit_certificate(state), 'single-qubit'
    witness = None
    notes: List[str] = []
    if certificate is not None:
        verdict = Verdict.SEPARABLE
    else:
        witness, lowest_ppt = _ppt_witness(state)
        if witness is not None:
            verdict = Verdict.ENTANGLED
        else:
            verdict = Verdict.UNDETERMINED
            if n == 2:
                notes.append(f'partial transpose is nonnegative (min eigenvalue {lowest_ppt:.6g}); '
                             f'for two qubits this implies separability, but no product ensemble was constructed')

    delta = delta_distance(state)
    if delta <= delta_ball_radius(n):
        notes.append('delta-distance lies inside the separable ball')

    return SeparabilityReport(
        num_qubits=n,
        epsilon=eps,
        delta=delta,
        thresholds=Thresholds(
            discrete=discrete_threshold(rho1),
            continuous_floor=floor_threshold(n),
            continuous_state=continuous_state,
            tetrahedral=tetrahedral,
        ),
        bounds=Bounds(
            lower=lower_bound(n),
            delta_ball=delta_ball_radius(n),
            lower_prior=lower_bound_prior(n) if n >= 2 else None,
            upper=upper_bound(n) if n % 2 == 0 else None,
        ),
        verdict=verdict,
        certificate=certificate,
        certificate_source=source,
        witness=witness,
        notes=tuple(notes),
    )
