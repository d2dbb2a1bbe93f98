import io
import json
import math
import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from unittest import TestCase

import numpy as np

from sepscope.cli import main
from sepscope.continuum import FOUR_PI
from sepscope.densmat import BlochVector, DensityMatrix, make_bell, make_ghz, make_mixed
from sepscope.serialization import dump_state, read_report


class CliTestCase(TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls._tmp = tempfile.TemporaryDirectory()
        cls.tmp = cls._tmp.name
        cls.ghz_path = os.path.join(cls.tmp, 'ghz.json')
        cls.bell_path = os.path.join(cls.tmp, 'bell.json')
        cls.mixed_path = os.path.join(cls.tmp, 'mixed.json')
        dump_state(make_ghz(3), cls.ghz_path, form='pauli')
        dump_state(make_bell(), cls.bell_path)
        dump_state(make_mixed(2), cls.mixed_path)

    @classmethod
    def tearDownClass(cls) -> None:
        cls._tmp.cleanup()

    def run_cli(self, *argv: str):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_expand_ghz(self):
        code, out, _ = self.run_cli('expand', self.ghz_path)
        self.assertEqual(0, code)
        lines = out.splitlines()
        self.assertEqual(8, len(lines))
        self.assertEqual('0 0 0 1', lines[0])
        self.assertIn('1 2 2 -1', lines)

    def test_expand_mixed(self):
        code, out, _ = self.run_cli('expand', self.mixed_path)
        self.assertEqual(0, code)
        self.assertEqual(['0 0 1'], out.splitlines())

    def test_expand_malformed(self):
        path = os.path.join(self.tmp, 'malformed.json')
        with open(path, 'w') as f:
            json.dump({'dense': {'num_qubits': 1, 'entries': [[1, 0], [0, 0], [0, 0], [1, 0]]}}, f)
        code, out, err = self.run_cli('expand', path)
        self.assertEqual(1, code)
        self.assertEqual('', out)
        self.assertIn('unit trace', err)

    def test_missing_file(self):
        code, _, err = self.run_cli('expand', os.path.join(self.tmp, 'absent.json'))
        self.assertEqual(1, code)
        self.assertIn('error', err)

    def test_classify_ghz_discrete(self):
        out_path = os.path.join(self.tmp, 'ghz-report.json')
        code, out, _ = self.run_cli('classify', self.ghz_path, '--eps', '0.037037', '--out', out_path,
                                    '--weight-starts', '0', '--tetra-starts', '0')
        self.assertEqual(0, code)
        self.assertIn('separable-certified', out)
        report = read_report(out_path).report
        self.assertEqual(216, len(report.certificate.terms))
        self.assertTrue(all(w >= 0 for w in report.certificate.weights))

    def test_classify_bell_entangled(self):
        code, out, _ = self.run_cli('classify', self.bell_path, '--eps', '0.5', '--weight-starts', '0',
                                    '--tetra-starts', '0')
        self.assertEqual(2, code)
        data = json.loads(out)
        self.assertEqual('entangled-certified', data['verdict'])
        self.assertAlmostEqual(-1 / 8, data['witness']['min_eigenvalue'], places=14)

    def test_classify_ghz_tetrahedral(self):
        code, out, _ = self.run_cli('classify', self.ghz_path, '--eps', '0.06', '--weight-starts', '2',
                                    '--tetra-starts', '2', '--tetra-budget', '50')
        self.assertEqual(0, code)
        self.assertEqual(64, len(json.loads(out)['certificate']['terms']))

    def test_classify_undetermined(self):
        code, _, _ = self.run_cli('classify', self.bell_path, '--eps', '0.2', '--weight-starts', '0',
                                  '--tetra-starts', '0')
        self.assertEqual(3, code)

    def test_classify_single_qubit_without_search(self):
        path = os.path.join(self.tmp, 'tilted.json')
        dump_state(DensityMatrix(BlochVector.from_array(-np.ones(3) / np.sqrt(3)).projector()), path)
        code, out, err = self.run_cli('classify', path, '--eps', '1', '--weight-starts', '0', '--tetra-starts', '0')
        self.assertEqual(0, code, err)
        self.assertEqual('single-qubit', json.loads(out)['certificate']['source'])

    def test_classify_rejects_nan_state(self):
        path = os.path.join(self.tmp, 'nan.json')
        with open(path, 'w') as f:
            f.write('{"dense": {"num_qubits": 1, "entries": [[NaN, 0], [0, 0], [0, 0], [0.5, 0]]}}')
        code, out, err = self.run_cli('classify', path, '--eps', '0.5')
        self.assertEqual(1, code)
        self.assertEqual('', out)
        self.assertIn('finite', err)

    def test_classify_bad_eps(self):
        code, _, err = self.run_cli('classify', self.bell_path, '--eps', '1.5')
        self.assertEqual(1, code)
        self.assertIn('eps must lie in [0, 1]', err)

    def test_bounds(self):
        code, out, _ = self.run_cli('bounds', '--n-max', '4')
        self.assertEqual(0, code)
        rows = {int(line.split()[0]): line.split()[1:] for line in out.splitlines()[1:]}
        self.assertEqual({1, 2, 3, 4}, set(rows))

        def value(cell: str):
            return None if cell == '-' else float(cell)

        worst, lower, prior, upper, ball = map(value, rows[2])
        for got, want in ((worst, 1 / 15), (lower, 1 / 9), (prior, 1 / 3), (upper, 1 / 3), (ball, 1 / 20)):
            self.assertAlmostEqual(want, got, places=11)
        worst, lower, prior, upper, _ = map(value, rows[3])
        self.assertAlmostEqual(1 / 63, worst, places=11)
        self.assertAlmostEqual(1 / 33, lower, places=11)
        self.assertAlmostEqual(1 / 25, prior, places=11)
        self.assertIsNone(upper)
        self.assertAlmostEqual(1 / 5, value(rows[4][3]), places=11)

    def test_bounds_range(self):
        code, _, err = self.run_cli('bounds', '--n-max', '61')
        self.assertEqual(1, code)
        self.assertIn('1..60', err)

    def test_nmr_audit(self):
        code, out, _ = self.run_cli('nmr-audit', '--alpha', '2e-5', '--n-max', '60')
        self.assertEqual(0, code)
        crossing_line = next(line for line in out.splitlines() if line.startswith('crossing: N = '))
        crossing = int(crossing_line[len('crossing: N = '):].split(';')[0])
        self.assertIn(crossing, range(12, 16))
        self.assertIn('never enters the entangled-guaranteed region for N <= 60', out)

        _, smaller, _ = self.run_cli('nmr-audit', '--alpha', '1e-9', '--n-max', '60')
        smaller_line = next(line for line in smaller.splitlines() if line.startswith('crossing: N = '))
        self.assertGreater(int(smaller_line[len('crossing: N = '):].split(';')[0]), crossing)

    def test_nmr_audit_long_scan(self):
        code, out, err = self.run_cli('nmr-audit', '--n-max', '1100')
        self.assertEqual(0, code, err)
        self.assertIn('never enters the entangled-guaranteed region for N <= 1100', out)

    def test_werner(self):
        code, out, _ = self.run_cli('werner', '--n', '4', '--eps', '0.25')
        self.assertEqual(0, code)
        data = json.loads(out)
        self.assertTrue(data['entangled'])
        self.assertAlmostEqual(0.4, data['eps_prime'], places=14)

        code, _, err = self.run_cli('werner', '--n', '3', '--eps', '0.25')
        self.assertEqual(1, code)
        self.assertIn('even', err)

    def test_decompose(self):
        code, out, _ = self.run_cli('decompose', 'discrete', self.bell_path)
        self.assertEqual(0, code)
        data = json.loads(out)
        self.assertAlmostEqual(-8 / 36, data['min_weight'], places=14)
        self.assertAlmostEqual(1 / 9, data['threshold'], places=14)
        self.assertEqual(36, data['terms'])

        code, out, _ = self.run_cli('decompose', 'tetra', self.ghz_path)
        self.assertEqual(0, code)
        self.assertAlmostEqual(1 / (3 + 6 * math.sqrt(3)), json.loads(out)['threshold'], places=12)

    def test_minimize_w(self):
        code, out, _ = self.run_cli('minimize-w', self.bell_path, '--starts', '4', '--seed', '5')
        self.assertEqual(0, code)
        data = json.loads(out)
        self.assertAlmostEqual(-8 / FOUR_PI ** 2, data['min_weight'], places=12)
        self.assertEqual(5, data['seed'])
        self.assertEqual(2, len(data['bloch']))
