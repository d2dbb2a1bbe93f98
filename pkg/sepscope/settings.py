"""
sepscope settings.

Module-level constants only; read them as `settings.NAME` so tests can patch them.
"""
import os

# Validation tolerances
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
ROUND_TRIP_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-8
ENSEMBLE_SUM_TOL = 1e-9
CERTIFICATE_NEG_TOL = 1e-12
PPT_TOL = 1e-9
BLOCH_NORM_TOL = 1e-12
FRAME_TOL = 1e-12

# Capacity limits (number of qubits)
MAX_DENSE_QUBITS = 12
MAX_PAULI_QUBITS = 10
MAX_DISCRETE_QUBITS = 8
MAX_BIPARTITION_QUBITS = 8
MAX_TETRA_OPTIMIZE_QUBITS = 4
MAX_WEIGHT_MINIMIZE_QUBITS = 6

# Optimizer defaults
DEFAULT_SEED = 0
DEFAULT_WEIGHT_STARTS = 64
DEFAULT_WEIGHT_SWEEPS = 500
DEFAULT_TETRA_STARTS = 32
DEFAULT_TETRA_BUDGET = 200

# NMR pseudopure calibration: eps(2) = 1e-5
DEFAULT_NMR_ALPHA = 2e-5
DEFAULT_NMR_N_MAX = 60


def _threads_from_env() -> int:
    raw = os.environ.get('SEPSCOPE_THREADS')
    if not raw:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f'SEPSCOPE_THREADS must be a positive integer, got "{raw}"') from None
    if threads < 1:
        raise ValueError(f'SEPSCOPE_THREADS must be a positive integer, got "{raw}"')
    return threads


THREADS = _threads_from_env()
