from unittest import TestCase

import numpy as np

from sepscope.densmat import DensityMatrix, make_bell, make_ghz, make_max_entangled, mix, random_density_matrix
from sepscope.exceptions import CapacityError, DomainError, RangeError
from sepscope.frontier import (
    Bipartition, all_bipartitions, bound_crossover, bounds_table, construct_werner_instance, critical_dimension,
    local_projection, lower_bound, lower_bound_prior, nmr_audit, nmr_crossing, nmr_epsilon, nmr_never_enters, partial_transpose,
    ppt_min_eigenvalue, upper_bound, werner_state
)


class BoundsTestCase(TestCase):
    def test_small_values(self):
        self.assertEqual(1 / 9, lower_bound(2))
        self.assertEqual(1 / 33, lower_bound(3))
        self.assertAlmostEqual(1 / 3, lower_bound_prior(2), places=15)
        self.assertAlmostEqual(1 / 25, lower_bound_prior(3), places=15)
        self.assertEqual(1 / 3, upper_bound(2))
        self.assertEqual(1 / 5, upper_bound(4))

    def test_domains(self):
        with self.assertRaises(DomainError):
            upper_bound(3)
        with self.assertRaises(DomainError):
            lower_bound_prior(1)
        with self.assertRaises(DomainError):
            lower_bound(0)

    def test_crossover(self):
        crossover = bound_crossover()
        self.assertEqual(4, crossover)
        for n in range(crossover, 61):
            self.assertGreater(lower_bound(n), lower_bound_prior(n), f'n = {n}')
        self.assertLessEqual(lower_bound(3), lower_bound_prior(3))

    def test_lower_never_exceeds_upper(self):
        for n in range(2, 61, 2):
            self.assertLess(lower_bound(n), upper_bound(n))

    def test_table(self):
        rows = bounds_table(4)
        self.assertEqual([1, 2, 3, 4], [row.n for row in rows])
        two = rows[1]
        self.assertAlmostEqual(1 / 15, two.discrete_worst_case, places=15)
        self.assertEqual(1 / 9, two.lower)
        self.assertAlmostEqual(1 / 3, two.lower_prior, places=15)
        self.assertEqual(1 / 20, two.delta_ball)
        self.assertIsNone(rows[2].upper)
        self.assertIsNone(rows[0].lower_prior)
        with self.assertRaises(RangeError):
            bounds_table(61)


class WernerTestCase(TestCase):
    def test_two_qubits_is_the_werner_state(self):
        reduction = construct_werner_instance(2, 0.4)
        self.assertAlmostEqual(0.4, reduction.eps_prime, places=15)
        self.assertAlmostEqual(1.0, reduction.norm_A, places=15)
        np.testing.assert_allclose(werner_state(0.4).entries, reduction.projected_state.entries, atol=1e-15)

    def test_two_qubit_threshold(self):
        below = construct_werner_instance(2, 1 / 3 - 1e-7).projected_state
        above = construct_werner_instance(2, 1 / 3 + 1e-7).projected_state
        self.assertGreaterEqual(ppt_min_eigenvalue(below, [1]), -1e-9)
        self.assertLess(ppt_min_eigenvalue(above, [1]), -1e-9)

    def test_four_qubit_threshold(self):
        eps = upper_bound(4)
        below = construct_werner_instance(4, eps - 1e-7)
        above = construct_werner_instance(4, eps + 1e-7)
        self.assertGreaterEqual(ppt_min_eigenvalue(below.projected_state, [1]), -1e-9)
        self.assertLess(ppt_min_eigenvalue(above.projected_state, [1]), -1e-9)
        self.assertAlmostEqual(1 / 3, construct_werner_instance(4, eps).eps_prime, places=14)

    def test_reduction_quantities(self):
        for n, eps in ((4, 0.3), (6, 0.05), (6, 0.5)):
            reduction = construct_werner_instance(n, eps)
            d = 2 ** (n // 2)
            self.assertEqual(d, reduction.d)
            self.assertAlmostEqual(4 / d ** 2 * (1 + eps * (d / 2 - 1)), reduction.norm_A, places=14)
            self.assertAlmostEqual(reduction.eps_prime, reduction.recovered_eps_prime, places=12)

    def test_closed_form_on_random_instances(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            n = int(rng.choice([2, 4, 6, 8]))
            eps = float(rng.uniform(0, 1))
            reduction = construct_werner_instance(n, eps)
            d = 2 ** (n // 2)
            expected = (eps * d / 2) / (1 + eps * (d / 2 - 1))
            self.assertAlmostEqual(expected, reduction.recovered_eps_prime, delta=1e-12, msg=f'n = {n}, eps = {eps}')

    def test_local_projection(self):
        rho = mix(0.3, make_max_entangled(4))
        np.testing.assert_allclose(
            construct_werner_instance(4, 0.3).projected_state.entries, local_projection(rho).entries, atol=1e-15
        )
        np.testing.assert_array_equal(make_bell().entries, local_projection(make_bell()).entries)
        outside = np.zeros((16, 16))
        outside[15, 15] = 1
        self.assertIsNone(local_projection(DensityMatrix(outside)))
        with self.assertRaises(DomainError):
            local_projection(make_ghz(3))

    def test_arguments(self):
        with self.assertRaises(DomainError):
            construct_werner_instance(3, 0.5)
        with self.assertRaises(RangeError):
            construct_werner_instance(4, 1.5)

    def test_critical_dimension(self):
        self.assertEqual(2, critical_dimension(0.5))
        self.assertEqual(8, critical_dimension(0.2))
        self.assertEqual(4, critical_dimension(0.21))
        eps = 0.01
        d = critical_dimension(eps)
        self.assertGreater(d, 1 / eps - 1)
        self.assertLessEqual(d // 2, 1 / eps - 1)
        with self.assertRaises(RangeError):
            critical_dimension(0)


class PartialTransposeTestCase(TestCase):
    def test_bipartitions(self):
        self.assertEqual(['0|1'], [str(cut) for cut in all_bipartitions(2)])
        self.assertEqual(['0,2|1', '0,1|2', '0|1,2'], [str(cut) for cut in all_bipartitions(3)])
        self.assertEqual(7, len(all_bipartitions(4)))
        with self.assertRaises(CapacityError):
            all_bipartitions(9)

    def test_invalid_cut(self):
        with self.assertRaises(DomainError):
            Bipartition(3, ())
        with self.assertRaises(DomainError):
            Bipartition(3, (0, 1, 2))
        with self.assertRaises(DomainError):
            Bipartition(3, (3,))
        with self.assertRaises(DomainError):
            ppt_min_eigenvalue(make_bell(), Bipartition(3, (1,)))

    def test_bell_witness(self):
        self.assertAlmostEqual(-1 / 8, ppt_min_eigenvalue(mix(0.5, make_bell()), [1]), places=14)
        self.assertAlmostEqual(-1 / 2, ppt_min_eigenvalue(make_bell(), Bipartition(2, (1,))), places=14)

    def test_transpose_twice_is_identity(self):
        rho = random_density_matrix(3, np.random.default_rng(6))
        cut = Bipartition(3, (0, 2))
        once = DensityMatrix(partial_transpose(rho, cut), validate=False)
        np.testing.assert_array_equal(rho.entries, partial_transpose(once, cut))

    def test_product_state_is_ppt(self):
        rng = np.random.default_rng(1)
        factors = [random_density_matrix(1, rng).entries for _ in range(3)]
        rho = DensityMatrix(np.kron(np.kron(factors[0], factors[1]), factors[2]))
        for cut in all_bipartitions(3):
            self.assertGreaterEqual(ppt_min_eigenvalue(rho, cut), -1e-12)

    def test_ghz_is_npt_on_every_cut(self):
        for cut in all_bipartitions(3):
            self.assertAlmostEqual(-1 / 2, ppt_min_eigenvalue(make_ghz(3), cut), places=12)


class NmrTestCase(TestCase):
    def test_calibration(self):
        self.assertAlmostEqual(1e-5, nmr_epsilon(2), places=20)
        with self.assertRaises(RangeError):
            nmr_epsilon(2, alpha=0)

    def test_crossing(self):
        crossing = nmr_crossing()
        self.assertIn(crossing, range(12, 16))
        self.assertGreater(nmr_crossing(1e-9), crossing)
        self.assertIsNone(nmr_crossing(1e-9, n_max=crossing))

    def test_never_enters(self):
        self.assertIsNone(nmr_never_enters(n_max=60))
        self.assertIsNone(nmr_never_enters(0.5, n_max=60))
        self.assertEqual(2, nmr_never_enters(1.0))

    def test_audit_regions(self):
        rows = nmr_audit(n_max=60)
        crossing = nmr_crossing()
        self.assertEqual(60, len(rows))
        for row in rows:
            self.assertEqual('separable' if row.n < crossing else 'undetermined', row.region, f'n = {row.n}')
        self.assertEqual('entangled-exists', nmr_audit(1.0, n_max=2)[1].region)

    def test_long_audit_does_not_overflow(self):
        self.assertGreater(nmr_epsilon(1000), 0)
        self.assertLess(nmr_epsilon(1100), 1e-300)
        rows = nmr_audit(n_max=1100)
        self.assertEqual(1100, len(rows))
        self.assertEqual('undetermined', rows[-1].region)
