"""
JSON state and report files.

State file, one of:

    {"dense": {"num_qubits": N, "entries": [[re, im], ...]}}                 row-major, 4^N pairs
    {"pauli": {"num_qubits": N, "terms": [{"indices": [a_1, ..., a_N], "value": c}, ...]}}

Report file: a SeparabilityReport plus the tool version, seed, elapsed time and the dense rho_eps
it was computed for, so that the certificate can be re-validated on load.
"""
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from sepscope import settings
from sepscope.__about__ import __version__
from sepscope.classify import Bounds, SeparabilityReport, Thresholds, Verdict, Witness
from sepscope.densmat import BlochVector, DensityMatrix, PauliTensor, ProductEnsemble, pauli_expand, pauli_reconstruct
from sepscope.exceptions import InvalidStateError, NotACertificateError

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def _significant(value: float, digits: int = 15) -> float:
    return float(f'{value:.{digits}g}')


def _require(data: Any, key: str, where: str) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise InvalidStateError(f'{where} must contain "{key}"')
    return data[key]


def state_to_dict(rho: DensityMatrix, form: str = 'dense') -> Dict[str, Any]:
    if form == 'dense':
        return {'dense': {
            'num_qubits': rho.num_qubits,
            'entries': [[float(z.real), float(z.imag)] for z in rho.entries.ravel()],
        }}
    if form == 'pauli':
        t = pauli_expand(rho)
        return {'pauli': {
            'num_qubits': t.num_qubits,
            'terms': [{'indices': list(index), 'value': value} for index, value in t.nonzero_terms()],
        }}
    raise ValueError(f'unknown state form "{form}", use "dense" or "pauli"')


def state_from_dict(data: Dict[str, Any]) -> DensityMatrix:
    if isinstance(data, dict) and 'dense' in data:
        dense = data['dense']
        num_qubits = _require(dense, 'num_qubits', 'dense state')
        entries = _require(dense, 'entries', 'dense state')
        if not isinstance(num_qubits, int) or num_qubits < 1:
            raise InvalidStateError(f'num_qubits must be a positive integer, got {num_qubits!r}')
        dim = 2 ** num_qubits
        if not isinstance(entries, list) or len(entries) != dim * dim:
            raise InvalidStateError(f'dense state of {num_qubits} qubits needs {dim * dim} [re, im] entries')
        try:
            matrix = np.array([complex(float(re), float(im)) for re, im in entries]).reshape(dim, dim)
        except (TypeError, ValueError) as e:
            raise InvalidStateError(f'dense entries must be [re, im] pairs of numbers: {e}') from e
        return DensityMatrix(matrix)

    if isinstance(data, dict) and 'pauli' in data:
        pauli = data['pauli']
        num_qubits = _require(pauli, 'num_qubits', 'pauli state')
        terms = _require(pauli, 'terms', 'pauli state')
        if not isinstance(num_qubits, int) or num_qubits < 1:
            raise InvalidStateError(f'num_qubits must be a positive integer, got {num_qubits!r}')
        if not isinstance(terms, list):
            raise InvalidStateError('pauli terms must be a list of {"indices", "value"} objects')
        try:
            parsed = [
                (tuple(_require(term, 'indices', 'pauli term')), float(_require(term, 'value', 'pauli term')))
                for term in terms
            ]
        except (TypeError, ValueError) as e:
            raise InvalidStateError(f'pauli term indices must be a list and value a number: {e}') from e
        return pauli_reconstruct(PauliTensor.from_terms(num_qubits, parsed))

    raise InvalidStateError('state file must contain either a "dense" or a "pauli" object')


def load_state(path: PathLike) -> DensityMatrix:
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidStateError(f'state file {path} is not valid JSON: {e}') from e
    return state_from_dict(data)


def _write_atomic(path: PathLike, data: Dict[str, Any]) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.sepscope-', suffix='.json')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2)
            f.write('\n')
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def dump_state(rho: DensityMatrix, path: PathLike, form: str = 'dense') -> None:
    _write_atomic(path, state_to_dict(rho, form))


@dataclass(frozen=True)
class ReportFile:
    report: SeparabilityReport
    state: DensityMatrix
    seed: int
    elapsed_seconds: float
    version: str = __version__


def _ensemble_to_dict(ensemble: ProductEnsemble) -> list:
    return [
        {'weight': weight, 'bloch': [[_significant(b.x), _significant(b.y), _significant(b.z)] for b in blochs]}
        for weight, blochs in ensemble.terms
    ]


def _ensemble_from_list(terms: list) -> ProductEnsemble:
    return ProductEnsemble(tuple(
        (float(term['weight']), tuple(BlochVector.from_array(v) for v in term['bloch']))
        for term in terms
    ))


def report_to_dict(report_file: ReportFile) -> Dict[str, Any]:
    report = report_file.report
    return {
        'tool': {'name': 'sepscope', 'version': report_file.version},
        'seed': report_file.seed,
        'elapsed_seconds': report_file.elapsed_seconds,
        'num_qubits': report.num_qubits,
        'epsilon': report.epsilon,
        'delta': report.delta,
        'verdict': report.verdict.value,
        'thresholds': {
            'discrete': report.thresholds.discrete,
            'continuous_floor': report.thresholds.continuous_floor,
            'continuous_state': report.thresholds.continuous_state,
            'tetrahedral': report.thresholds.tetrahedral,
        },
        'bounds': {
            'lower': report.bounds.lower,
            'lower_prior': report.bounds.lower_prior,
            'upper': report.bounds.upper,
            'delta_ball': report.bounds.delta_ball,
        },
        'certificate': None if report.certificate is None else {
            'source': report.certificate_source,
            'terms': _ensemble_to_dict(report.certificate),
        },
        'witness': None if report.witness is None else {
            'second_group': list(report.witness.second_group),
            'min_eigenvalue': report.witness.min_eigenvalue,
            'subject': report.witness.subject,
        },
        'notes': list(report.notes),
        'state': state_to_dict(report_file.state),
    }


def report_from_dict(data: Dict[str, Any]) -> ReportFile:
    """
    Rebuild a report and re-validate it: the certificate must still be a valid ensemble
    reconstructing the stored state within RECONSTRUCTION_TOL.
    """
    try:
        state = state_from_dict(data['state'])
        certificate = None
        if data['certificate'] is not None:
            certificate = _ensemble_from_list(data['certificate']['terms'])
            error = certificate.reconstruction_error(state)
            if error > settings.RECONSTRUCTION_TOL:
                raise NotACertificateError(f'stored certificate misses the stored state by {error:.3e}')
        witness = None
        if data['witness'] is not None:
            witness = Witness(tuple(data['witness']['second_group']), float(data['witness']['min_eigenvalue']),
                              data['witness'].get('subject', 'state'))
        report = SeparabilityReport(
            num_qubits=int(data['num_qubits']),
            epsilon=float(data['epsilon']),
            delta=float(data['delta']),
            thresholds=Thresholds(**data['thresholds']),
            bounds=Bounds(**data['bounds']),
            verdict=Verdict(data['verdict']),
            certificate=certificate,
            certificate_source=None if data['certificate'] is None else data['certificate']['source'],
            witness=witness,
            notes=tuple(data['notes']),
        )
        return ReportFile(
            report=report,
            state=state,
            seed=int(data['seed']),
            elapsed_seconds=float(data['elapsed_seconds']),
            version=data['tool']['version'],
        )
    except (KeyError, TypeError) as e:
        raise InvalidStateError(f'report file is missing or mistypes a field: {e!r}') from e


def write_report(path: PathLike, report_file: ReportFile) -> None:
    _write_atomic(path, report_to_dict(report_file))
    logger.debug('report written to %s', path)


def read_report(path: PathLike) -> ReportFile:
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidStateError(f'report file {path} is not valid JSON: {e}') from e
    return report_from_dict(data)
