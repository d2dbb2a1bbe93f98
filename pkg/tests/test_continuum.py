import math
from unittest import TestCase, mock

import numpy as np

from sepscope import settings
from sepscope.continuum import (
    FOUR_PI, continuous_threshold, delta_ball_radius, floor_threshold, ghz_weight_closed_form, minimize_weight,
    state_continuous_threshold, weight_at, weight_at_trace, weight_floor
)
from sepscope.densmat import BlochVector, PauliTensor, make_bell, make_ghz, make_mixed, pauli_expand, random_density_matrix
from sepscope.discrete import discrete_threshold
from sepscope.exceptions import CapacityError, RangeError
from sepscope.frontier import lower_bound


def _random_blochs(rng: np.random.Generator, n: int):
    return [BlochVector.from_array(v / np.linalg.norm(v)) for v in rng.standard_normal((n, 3))]


class WeightFunctionTestCase(TestCase):
    def test_weight_forms_agree(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            rho = random_density_matrix(n, rng)
            blochs = _random_blochs(rng, n)
            self.assertAlmostEqual(weight_at_trace(rho, blochs), weight_at(pauli_expand(rho), blochs), places=14)

    def test_mixed_state_weight_is_uniform(self):
        rng = np.random.default_rng(0)
        t = pauli_expand(make_mixed(2))
        self.assertAlmostEqual(FOUR_PI ** -2, weight_at(t, _random_blochs(rng, 2)), places=15)

    def test_ghz_closed_form(self):
        rng = np.random.default_rng(8)
        t = pauli_expand(make_ghz(3))
        for _ in range(1000):
            theta = rng.uniform(0, math.pi, 3)
            phi = rng.uniform(0, 2 * math.pi, 3)
            blochs = [BlochVector.from_angles(a, b) for a, b in zip(theta, phi)]
            self.assertAlmostEqual(ghz_weight_closed_form(theta, phi), weight_at(t, blochs), places=14)

    def test_weight_integrates_to_one(self):
        rng = np.random.default_rng(17)
        n = 2
        t = pauli_expand(random_density_matrix(n, rng))
        samples = np.array([weight_at(t, _random_blochs(rng, n)) for _ in range(20000)]) * FOUR_PI ** n
        standard_error = samples.std(ddof=1) / math.sqrt(samples.size)
        self.assertLess(abs(samples.mean() - 1), 3 * standard_error)

    def test_weight_at_needs_one_vector_per_qubit(self):
        with self.assertRaises(RangeError):
            weight_at(pauli_expand(make_bell()), [BlochVector.axis(3, 1)])

    def test_floor_threshold_is_universal_lower_bound(self):
        for n in range(1, 21):
            expected = 1 / (1 + 2 ** (2 * n - 1))
            self.assertLess(abs(floor_threshold(n) - expected), 1e-12 * expected, f'n = {n}')
            self.assertEqual(lower_bound(n), expected)

    def test_floor_is_below_every_state(self):
        rng = np.random.default_rng(9)
        for n in (1, 2, 3):
            rho = random_density_matrix(n, rng, rank=1)
            value, _ = minimize_weight(pauli_expand(rho), starts=4, seed=1)
            self.assertGreaterEqual(value, weight_floor(n) - 1e-12)

    def test_delta_ball_radius(self):
        self.assertEqual(1 / 20, delta_ball_radius(2))
        self.assertAlmostEqual(20 ** -1.5, delta_ball_radius(3), places=15)

    def test_threshold_rejects_weight_above_reference(self):
        with self.assertRaises(RangeError):
            continuous_threshold(pauli_expand(make_bell()), 1.0)


class MinimizeWeightTestCase(TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.ghz = pauli_expand(make_ghz(3))
        cls.bell = pauli_expand(make_bell())

    def test_ghz_minimum(self):
        value, blochs = minimize_weight(self.ghz, starts=16, seed=0)
        self.assertLess(abs(value - (-26 / FOUR_PI ** 3)), 1e-9)
        angles = [b.angles() for b in blochs]
        for theta, _ in angles:
            self.assertAlmostEqual(math.pi / 2, theta, places=4)
        phase = sum(phi for _, phi in angles) % (2 * math.pi)
        self.assertAlmostEqual(math.pi, phase, places=4)

    def test_ghz_discrete_and_continuous_thresholds_agree(self):
        self.assertLess(abs(continuous_threshold(self.ghz, -26 / FOUR_PI ** 3) - 1 / 27), 1e-12)
        self.assertLess(abs(state_continuous_threshold(self.ghz, starts=16) - discrete_threshold(make_ghz(3))), 1e-9)

    def test_bell_minimum(self):
        value, blochs = minimize_weight(self.bell, starts=8, seed=3)
        self.assertAlmostEqual(-8 / FOUR_PI ** 2, value, places=12)
        n1, n2 = blochs[0].vector, blochs[1].vector
        np.testing.assert_allclose(-np.array([n1[0], -n1[1], n1[2]]), n2, atol=1e-6)

    def test_not_above_grid_minimum(self):
        grid = [
            BlochVector.from_angles(math.radians(theta), math.radians(phi)).extended()
            for theta in range(0, 181, 10) for phi in range(0, 360, 10)
        ]
        extended = np.array(grid)
        rng = np.random.default_rng(13)
        for _ in range(5):
            t = pauli_expand(random_density_matrix(2, rng))
            grid_min = (3 / FOUR_PI) ** 2 * float((extended @ t.coeffs @ extended.T).min())
            value, _ = minimize_weight(t, starts=8, seed=0)
            self.assertLessEqual(value, grid_min + 1e-12)

    def test_reproducible_across_thread_counts(self):
        t = pauli_expand(random_density_matrix(3, np.random.default_rng(1)))
        with mock.patch.object(settings, 'THREADS', 1):
            serial = minimize_weight(t, starts=6, seed=42)
        with mock.patch.object(settings, 'THREADS', 4):
            parallel = minimize_weight(t, starts=6, seed=42)
        self.assertEqual(serial[0], parallel[0])
        self.assertEqual(serial[1], parallel[1])

    def test_arguments(self):
        with self.assertRaises(RangeError):
            minimize_weight(self.bell, starts=0)
        coeffs = np.zeros((4,) * 7)
        coeffs[(0,) * 7] = 1
        with self.assertRaises(CapacityError):
            minimize_weight(PauliTensor(7, coeffs))
