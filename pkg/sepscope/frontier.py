"""
Universal bounds on the separable neighbourhood of the maximally mixed state,
the Werner-projection construction of nonseparable states, the partial-transpose oracle
and the NMR pseudopure scaling audit.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from sepscope import settings
from sepscope.continuum import delta_ball_radius
from sepscope.densmat import DensityMatrix, make_max_entangled, mix
from sepscope.discrete import worst_case_discrete_threshold
from sepscope.exceptions import DomainError, InvalidStateError, RangeError
from sepscope.utils import check_qubit_limit

logger = logging.getLogger(__name__)


def lower_bound(n: int) -> float:
    """1/(1 + 2^(2n-1)): every rho_eps with eps below this is separable."""
    if n < 1:
        raise DomainError(f'number of qubits must be >= 1, got {n}')
    return 1 / (1 + 2 ** (2 * n - 1))


def lower_bound_prior(n: int) -> float:
    """(1 + 2^(n-1))^-(n-1), the earlier separability bound; defined for n >= 2."""
    if n < 2:
        raise DomainError(f'prior lower bound is defined for n >= 2, got {n}')
    return float(1 + 2 ** (n - 1)) ** -(n - 1)


def upper_bound(n: int) -> float:
    """
    1/(1 + 2^(n/2)): for every larger eps some rho_eps of n qubits is nonseparable
    (see construct_werner_instance).
    """
    if n < 2 or n % 2:
        raise DomainError(f'upper bound pairs two aggregates of n/2 qubits, n must be even and >= 2, got {n}')
    return 1 / (1 + 2 ** (n // 2))


def bound_crossover(n_max: int = settings.DEFAULT_NMR_N_MAX) -> int:
    """
    Smallest n from which lower_bound beats lower_bound_prior for every n up to n_max.
    """
    crossover = n_max + 1
    for n in range(n_max, 1, -1):
        if lower_bound(n) <= lower_bound_prior(n):
            break
        crossover = n
    return crossover


@dataclass(frozen=True)
class BoundsRow:
    n: int
    discrete_worst_case: float
    lower: float
    lower_prior: Optional[float]
    upper: Optional[float]
    delta_ball: float


def bounds_table(n_max: int) -> List[BoundsRow]:
    if not 1 <= n_max <= 60:
        raise RangeError(f'n-max must lie in 1..60, got {n_max}')
    return [
        BoundsRow(
            n=n,
            discrete_worst_case=worst_case_discrete_threshold(n),
            lower=lower_bound(n),
            lower_prior=lower_bound_prior(n) if n >= 2 else None,
            upper=upper_bound(n) if n % 2 == 0 else None,
            delta_ball=delta_ball_radius(n),
        )
        for n in range(1, n_max + 1)
    ]


@dataclass(frozen=True)
class WernerReduction:
    d: int
    eps: float
    eps_prime: float
    norm_A: float
    projected_state: DensityMatrix

    @property
    def recovered_eps_prime(self) -> float:
        """The maximally entangled fraction read off the projected matrix, (|00><11| entry) * 2."""
        return 2 * float(self.projected_state.entries[0, 3].real)


def werner_state(eps_prime: float) -> DensityMatrix:
    """(1 - eps') M_4 + eps' |phi><phi|"""
    return mix(eps_prime, make_max_entangled(2))


def _project_aggregates(rho: DensityMatrix) -> Tuple[np.ndarray, float]:
    d = 2 ** (rho.num_qubits // 2)
    kept = [a * d + b for a in (0, 1) for b in (0, 1)]
    block = rho.entries[np.ix_(kept, kept)]
    return block, float(np.trace(block).real)


def local_projection(rho: DensityMatrix) -> Optional[DensityMatrix]:
    """
    Project both halves of an even-n state onto the span of their first two basis states and
    renormalize, giving a two-qubit state. Local projections cannot create entanglement, so a
    negative partial transpose of the result is a witness for rho. None when the projection vanishes.
    """
    n = rho.num_qubits
    if n < 2 or n % 2:
        raise DomainError(f'local projection pairs two aggregates of n/2 qubits, n must be even and >= 2, got {n}')
    block, norm = _project_aggregates(rho)
    if norm <= settings.PSD_TOL:
        return None
    return DensityMatrix(block / norm)


def construct_werner_instance(n: int, eps: float) -> WernerReduction:
    """
    Build rho_eps = (1 - eps) M_{d^2} + eps |psi><psi| for two aggregates of n/2 qubits (d = 2^(n/2)),
    project each aggregate onto span{|0>, |1>} and renormalize.
    The result is the two-qubit Werner state with eps' = (eps d/2) / (1 + eps (d/2 - 1)).
    """
    if n < 2 or n % 2:
        raise DomainError(f'Werner construction pairs two aggregates of n/2 qubits, n must be even and >= 2, got {n}')
    check_qubit_limit(n, settings.MAX_DENSE_QUBITS, 'construct_werner_instance')
    if not 0 <= eps <= 1:
        raise RangeError(f'eps must lie in [0, 1], got {eps}')
    d = 2 ** (n // 2)
    rho = mix(eps, make_max_entangled(d))

    block, norm_a = _project_aggregates(rho)
    projected = DensityMatrix(block / norm_a)

    expected_norm = 4 / d ** 2 * (1 + eps * (d / 2 - 1))
    eps_prime = (eps * d / 2) / (1 + eps * (d / 2 - 1))
    deviation = float(np.max(np.abs(projected.entries - werner_state(eps_prime).entries)))
    if abs(norm_a - expected_norm) > 1e-12 or deviation > 1e-12:
        raise InvalidStateError(
            f'projected state is not the Werner state with eps\' = {eps_prime:.12g} '
            f'(norm deviation {abs(norm_a - expected_norm):.3e}, entry deviation {deviation:.3e})'
        )
    return WernerReduction(d=d, eps=eps, eps_prime=eps_prime, norm_A=norm_a, projected_state=projected)


def critical_dimension(eps: float) -> int:
    """Smallest aggregate dimension d = 2^k for which the Werner reduction of rho_eps is entangled (d > 1/eps - 1)."""
    if not 0 < eps <= 1:
        raise RangeError(f'eps must lie in (0, 1], got {eps}')
    d = 2
    while d <= 1 / eps - 1:
        d *= 2
    return d


@dataclass(frozen=True)
class Bipartition:
    """Cut of the qubits into two nonempty groups; the partial transpose acts on `second`."""
    num_qubits: int
    second: Tuple[int, ...]

    def __post_init__(self):
        second = tuple(sorted(set(self.second)))
        if not second or len(second) >= self.num_qubits or second[0] < 0 or second[-1] >= self.num_qubits:
            raise DomainError(
                f'a cut must split {self.num_qubits} qubits into two nonempty groups, got second group {list(self.second)}'
            )
        object.__setattr__(self, 'second', second)

    @property
    def first(self) -> Tuple[int, ...]:
        return tuple(k for k in range(self.num_qubits) if k not in self.second)

    def __str__(self) -> str:
        return f'{",".join(map(str, self.first))}|{",".join(map(str, self.second))}'


def all_bipartitions(n: int) -> List[Bipartition]:
    """The 2^(n-1) - 1 cuts; qubit 0 always stays in the first group."""
    check_qubit_limit(n, settings.MAX_BIPARTITION_QUBITS, 'all_bipartitions')
    return [
        Bipartition(n, second)
        for size in range(1, n)
        for second in itertools.combinations(range(1, n), size)
    ]


def partial_transpose(rho: DensityMatrix, cut: Bipartition) -> np.ndarray:
    n = rho.num_qubits
    axes = list(range(2 * n))
    for k in cut.second:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return rho.entries.reshape((2,) * (2 * n)).transpose(axes).reshape(rho.dim, rho.dim)


def ppt_min_eigenvalue(rho: DensityMatrix, cut: Union[Bipartition, Sequence[int]]) -> float:
    """
    Minimum eigenvalue of the partial transpose over the second group.
    Below -PPT_TOL it certifies entanglement across the cut; for two qubits a value
    at or above -PPT_TOL also certifies separability.
    """
    if not isinstance(cut, Bipartition):
        cut = Bipartition(rho.num_qubits, tuple(cut))
    elif cut.num_qubits != rho.num_qubits:
        raise DomainError(f'cut is for {cut.num_qubits} qubits, state has {rho.num_qubits}')
    return float(np.linalg.eigvalsh(partial_transpose(rho, cut))[0])


def nmr_epsilon(n: int, alpha: float = settings.DEFAULT_NMR_ALPHA) -> float:
    """Pseudopure eps scaling like n / 2^n at fixed temperature; alpha sets the scale."""
    if alpha <= 0:
        raise RangeError(f'alpha must be > 0, got {alpha}')
    return math.ldexp(alpha * n, -n)


def _nmr_above_lower_bound(n: int, alpha: float) -> bool:
    # compared in logs, both sides underflow long before the scan ends
    return math.log(alpha) + math.log(n) - n * math.log(2) > -math.log(1 + 2 ** (2 * n - 1))


def nmr_crossing(alpha: float = settings.DEFAULT_NMR_ALPHA, n_max: int = 2000) -> Optional[int]:
    """
    Smallest n at which the pseudopure state leaves the region where lower_bound
    guarantees separability, or None if that does not happen up to n_max.
    """
    if alpha <= 0:
        raise RangeError(f'alpha must be > 0, got {alpha}')
    for n in range(1, n_max + 1):
        if _nmr_above_lower_bound(n, alpha):
            return n
    return None


def nmr_never_enters(alpha: float = settings.DEFAULT_NMR_ALPHA,
                     n_max: int = settings.DEFAULT_NMR_N_MAX) -> Optional[int]:
    """
    First even n <= n_max at which the pseudopure eps exceeds upper_bound(n), i.e. enters the
    region where entangled states are guaranteed; None if it never does.
    """
    for n in range(2, n_max + 1, 2):
        if nmr_epsilon(n, alpha) > upper_bound(n):
            return n
    return None


@dataclass(frozen=True)
class NmrAuditRow:
    n: int
    epsilon: float
    lower: float
    upper: Optional[float]
    region: str


def nmr_audit(alpha: float = settings.DEFAULT_NMR_ALPHA, n_max: int = settings.DEFAULT_NMR_N_MAX) -> List[NmrAuditRow]:
    rows = []
    for n in range(1, n_max + 1):
        eps = nmr_epsilon(n, alpha)
        upper = upper_bound(n) if n % 2 == 0 else None
        if not _nmr_above_lower_bound(n, alpha):
            region = 'separable'
        elif upper is not None and eps > upper:
            region = 'entangled-exists'
        else:
            region = 'undetermined'
        rows.append(NmrAuditRow(n=n, epsilon=eps, lower=lower_bound(n), upper=upper, region=region))
    return rows
