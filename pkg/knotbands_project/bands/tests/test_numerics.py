import numpy as np
import scipy.linalg
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from bands import numerics
from bands.exceptions import ConfigError, InvalidDimension, NearDefective, NotHermitian, RankDeficient


class EigTests(SimpleTestCase):
    def test_default_order_is_descending_imaginary_part(self):
        decomposition = numerics.eig(np.diag([-1j, 2.0, 1j]))
        assert_allclose(decomposition.eigenvalues, [1j, 2.0, -1j])

    def test_ties_in_imaginary_part_break_by_real_part(self):
        decomposition = numerics.eig(np.diag([-3.0, 5.0, 1.0]))
        assert_allclose(decomposition.eigenvalues, [5.0, 1.0, -3.0])

    def test_reconstruct_recovers_matrix(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        decomposition = numerics.eig(m)
        assert_allclose(decomposition.reconstruct(), m, atol=1e-10)

    def test_left_vectors_are_biorthonormal(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        decomposition = numerics.eig(m, left=True)
        assert_allclose(decomposition.left @ decomposition.right, np.eye(4), atol=1e-10)

    def test_non_square_input(self):
        with self.assertRaises(InvalidDimension):
            numerics.eig(np.ones((2, 3)))

    def test_tracking_follows_eigenvectors_through_reordering(self):
        thetas = np.linspace(-np.pi / 2, np.pi / 2, 10)
        matrices = [np.diag([np.exp(1j * theta), np.exp(-1j * theta)]) for theta in thetas]
        tracked = numerics.track_bands(matrices)
        assert_allclose(tracked[0].eigenvalues[0], 1j, atol=1e-12)
        # без отслеживания первой была бы зона с Im E = +1
        assert_allclose(tracked[-1].eigenvalues[0], -1j, atol=1e-12)
        self.assertGreater(min(d.tracking_overlap for d in tracked), 0.99)


class ExpmTests(SimpleTestCase):
    def test_matches_pade_for_diagonalizable_matrix(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        result, path = numerics.expm(m, 0.7, return_path=True)
        self.assertEqual(path, 'eig')
        assert_allclose(result, scipy.linalg.expm(-0.7j * m), atol=1e-9)

    def test_defective_matrix_falls_back(self):
        jordan = np.array([[0.0, 1.0], [0.0, 0.0]])
        result, path = numerics.expm(jordan, 2.0, return_path=True)
        self.assertEqual(path, 'pade')
        assert_allclose(result, [[1.0, -2.0j], [0.0, 1.0]], atol=1e-12)

    def test_defective_matrix_without_fallback(self):
        with self.assertRaises(NearDefective):
            numerics.expm(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0, allow_fallback=False)

    def test_negative_time(self):
        with self.assertRaises(ConfigError):
            numerics.expm(np.eye(2), -1.0)

    def test_zero_time_is_identity(self):
        assert_allclose(numerics.expm(np.ones((2, 2)), 0.0), np.eye(2))

    def test_semigroup(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            s, t = rng.uniform(0.1, 0.6, size=2)
            combined = numerics.expm(m, s + t)
            assert_allclose(combined, numerics.expm(m, s) @ numerics.expm(m, t),
                            atol=1e-9 * np.linalg.norm(combined))


class QrTests(SimpleTestCase):
    def test_unitary_with_positive_diagonal(self):
        rng = np.random.default_rng(2)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, r = numerics.qr_unitary(m)
        assert_allclose(q.conj().T @ q, np.eye(4), atol=1e-12)
        assert_allclose(q @ r, m, atol=1e-12)
        diagonal = np.diag(r)
        assert_allclose(diagonal.imag, 0.0, atol=1e-12)
        self.assertTrue(np.all(diagonal.real > 0))

    def test_repeated_calls_are_bit_identical(self):
        rng = np.random.default_rng(17)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        q1, r1 = numerics.qr_unitary(m.copy())
        q2, r2 = numerics.qr_unitary(m.copy())
        self.assertEqual(q1.tobytes(), q2.tobytes())
        self.assertEqual(r1.tobytes(), r2.tobytes())

    def test_rank_deficient_column(self):
        m = np.array([[1.0, 0.0], [0.0, 0.0]])
        with self.assertRaises(RankDeficient):
            numerics.qr_unitary(m)


class HermitianTests(SimpleTestCase):
    def test_max_eigenvalue(self):
        self.assertAlmostEqual(numerics.hermitian_max_eig(np.array([[2.0, 1.0], [1.0, 2.0]])), 3.0)

    def test_rayleigh_quotient_never_exceeds_max_eigenvalue(self):
        rng = np.random.default_rng(19)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = a.conj().T @ a - 2 * np.eye(4)
        largest = numerics.hermitian_max_eig(m)
        self.assertAlmostEqual(largest, float(np.linalg.eigvalsh(m)[-1]), places=10)
        for _ in range(50):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            quotient = float((v.conj() @ m @ v).real / (v.conj() @ v).real)
            self.assertLessEqual(quotient, largest + 1e-10)

    def test_rejects_non_hermitian(self):
        with self.assertRaises(NotHermitian):
            numerics.hermitian_max_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
