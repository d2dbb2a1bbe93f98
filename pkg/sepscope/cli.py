import argparse
import json
import logging
import sys
import time
from typing import Callable, Dict, List, Optional

from sepscope import settings
from sepscope.__about__ import __version__
from sepscope.classify import ClassifyOptions, Verdict, classify
from sepscope.continuum import continuous_threshold, minimize_weight, weight_floor
from sepscope.densmat import mix, pauli_expand
from sepscope.discrete import discrete_decompose, min_weight
from sepscope.exceptions import SepscopeError
from sepscope.frontier import (
    bounds_table, construct_werner_instance, nmr_audit, nmr_crossing, nmr_never_enters, ppt_min_eigenvalue, upper_bound
)
from sepscope.serialization import ReportFile, load_state, report_to_dict, write_report
from sepscope.tetrahedral import Tetrahedron, optimize_tetrahedra, tetrahedral_decompose
from sepscope.utils import mixing_threshold

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_CODES = {
    Verdict.SEPARABLE: 0,
    Verdict.ENTANGLED: 2,
    Verdict.UNDETERMINED: 3,
}


def _print_json(data) -> None:
    print(json.dumps(data, indent=2))


def _fmt(value: Optional[float]) -> str:
    return '-' if value is None else f'{value:.12g}'


def cmd_expand(args: argparse.Namespace) -> int:
    t = pauli_expand(load_state(args.state))
    for index, value in t.nonzero_terms():
        print(' '.join(map(str, index)), f'{value:.15g}')
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    t = pauli_expand(rho)
    if args.basis == 'discrete':
        d = discrete_decompose(t)
        value, index = min_weight(d)
        _print_json({
            'basis': 'discrete',
            'num_qubits': d.num_qubits,
            'terms': int(d.weights.size),
            'min_weight': value,
            'argmin': [{'axis': axis, 'sign': sign} for axis, sign in index],
            'threshold': mixing_threshold(6.0 ** -d.num_qubits, value),
        })
        return 0

    if args.optimize:
        tets, threshold = optimize_tetrahedra(rho, seed=args.seed)
    else:
        tets = [Tetrahedron.default()] * rho.num_qubits
        threshold = None
    d = tetrahedral_decompose(t, tets)
    _print_json({
        'basis': 'tetra',
        'num_qubits': d.num_qubits,
        'seed': args.seed,
        'terms': int(d.weights.size),
        'min_weight': d.min_weight,
        'threshold': threshold if threshold is not None else mixing_threshold(4.0 ** -d.num_qubits, d.min_weight),
        'tetrahedra': [tet.matrix.tolist() for tet in d.tetrahedra],
    })
    return 0


def cmd_minimize_w(args: argparse.Namespace) -> int:
    t = pauli_expand(load_state(args.state))
    value, blochs = minimize_weight(t, starts=args.starts, seed=args.seed)
    _print_json({
        'num_qubits': t.num_qubits,
        'seed': args.seed,
        'starts': args.starts,
        'min_weight': value,
        'floor': weight_floor(t.num_qubits),
        'threshold': continuous_threshold(t, value),
        'bloch': [[b.x, b.y, b.z] for b in blochs],
        'angles': [list(b.angles()) for b in blochs],
    })
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    rho1 = load_state(args.state)
    options = ClassifyOptions(
        seed=args.seed,
        weight_starts=args.weight_starts,
        tetra_starts=args.tetra_starts,
        tetra_budget=args.tetra_budget,
    )
    started = time.perf_counter()
    report = classify(rho1, args.eps, options)
    elapsed = time.perf_counter() - started
    report_file = ReportFile(report=report, state=mix(args.eps, rho1), seed=args.seed, elapsed_seconds=elapsed)
    if args.out:
        write_report(args.out, report_file)
        print(f'{report.verdict.value} (seed {args.seed}); report written to {args.out}')
    else:
        _print_json(report_to_dict(report_file))
    return EXIT_CODES[report.verdict]


def cmd_bounds(args: argparse.Namespace) -> int:
    print(f'{"N":>3}  {"discrete-worst":>18}  {"lower":>18}  {"lower-prior":>18}  {"upper":>18}  {"delta-ball":>18}')
    for row in bounds_table(args.n_max):
        print(f'{row.n:>3}  {_fmt(row.discrete_worst_case):>18}  {_fmt(row.lower):>18}  '
              f'{_fmt(row.lower_prior):>18}  {_fmt(row.upper):>18}  {_fmt(row.delta_ball):>18}')
    return 0


def cmd_werner(args: argparse.Namespace) -> int:
    reduction = construct_werner_instance(args.n, args.eps)
    ppt = ppt_min_eigenvalue(reduction.projected_state, [1])
    _print_json({
        'n': args.n,
        'd': reduction.d,
        'eps': reduction.eps,
        'eps_prime': reduction.eps_prime,
        'norm_A': reduction.norm_A,
        'upper_bound': upper_bound(args.n),
        'ppt_min_eigenvalue': ppt,
        'entangled': ppt < -settings.PPT_TOL,
    })
    return 0


def cmd_nmr_audit(args: argparse.Namespace) -> int:
    print(f'{"N":>3}  {"eps":>18}  {"lower":>18}  {"upper":>18}  region')
    for row in nmr_audit(args.alpha, args.n_max):
        print(f'{row.n:>3}  {_fmt(row.epsilon):>18}  {_fmt(row.lower):>18}  {_fmt(row.upper):>18}  {row.region}')
    crossing = nmr_crossing(args.alpha)
    if crossing is None:
        print('crossing: none; the pseudopure state stays inside the certified separable region')
    else:
        print(f'crossing: N = {crossing}; from here on separability is no longer guaranteed')
    offender = nmr_never_enters(args.alpha, args.n_max)
    if offender is None:
        print(f'never enters the entangled-guaranteed region for N <= {args.n_max}')
    else:
        print(f'enters the entangled-guaranteed region at N = {offender}')
    return 0


def _state_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('state', help='state file (JSON, dense or pauli form)')


def _seed_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--seed', type=int, default=settings.DEFAULT_SEED,
                        help=f'seed for every randomized search (default: {settings.DEFAULT_SEED})')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='sepscope',
        description='Certify separability of N-qubit states near the maximally mixed state.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true', help='log optimizer progress to stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('expand', help='print the nonzero Pauli coefficients of a state')
    _state_argument(p)

    p = sub.add_parser('decompose', help='product decomposition of a state and its mixing threshold')
    p.add_argument('basis', choices=['discrete', 'tetra'])
    _state_argument(p)
    p.add_argument('--optimize', action='store_true', help='optimize tetrahedron orientations (tetra only)')
    _seed_argument(p)

    p = sub.add_parser('minimize-w', help='minimum of the continuous weight function')
    _state_argument(p)
    p.add_argument('--starts', type=int, default=settings.DEFAULT_WEIGHT_STARTS)
    _seed_argument(p)

    p = sub.add_parser('classify', help='classify rho_eps = (1 - eps) M + eps rho1')
    _state_argument(p)
    p.add_argument('--eps', type=float, required=True)
    _seed_argument(p)
    p.add_argument('--out', help='write the report here instead of standard output')
    p.add_argument('--weight-starts', type=int, default=settings.DEFAULT_WEIGHT_STARTS)
    p.add_argument('--tetra-starts', type=int, default=settings.DEFAULT_TETRA_STARTS)
    p.add_argument('--tetra-budget', type=int, default=settings.DEFAULT_TETRA_BUDGET)

    p = sub.add_parser('bounds', help='table of universal separability bounds')
    p.add_argument('--n-max', type=int, default=20)

    p = sub.add_parser('werner', help='Werner projection of the maximally entangled mixture')
    p.add_argument('--n', type=int, required=True, help='even number of qubits')
    p.add_argument('--eps', type=float, required=True)

    p = sub.add_parser('nmr-audit', help='pseudopure eps against the bounds')
    p.add_argument('--alpha', type=float, default=settings.DEFAULT_NMR_ALPHA)
    p.add_argument('--n-max', type=int, default=settings.DEFAULT_NMR_N_MAX)
    return parser


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    'expand': cmd_expand,
    'decompose': cmd_decompose,
    'minimize-w': cmd_minimize_w,
    'classify': cmd_classify,
    'bounds': cmd_bounds,
    'werner': cmd_werner,
    'nmr-audit': cmd_nmr_audit,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (SepscopeError, OSError, json.JSONDecodeError) as e:
        print(f'sepscope {args.command}: error: {e}', file=sys.stderr)
        return EXIT_ERROR
