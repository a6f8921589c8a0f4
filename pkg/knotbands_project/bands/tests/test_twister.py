import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from bands.choices import KnotClass
from bands.exceptions import DegeneratePoint, InvalidDimension, MalformedTable, OnBoundary
from bands.twister import (
    ANCHORS_2BAND,
    ANCHORS_4BAND,
    TwisterSpec,
    analytic_spectrum_2band,
    analytic_spectrum_4band,
    build_hamiltonian,
    default_evolution_time,
    momentum_grid,
    phase_region,
    pure_twister_eigenvalues,
    read_phase_raster,
    region_grid,
    shift_matrix,
    spectral_class_2band,
    torus_embedding,
    torus_link_components,
    twister_matrix,
)


def set_distance(a, b):
    distances = np.abs(np.subtract.outer(np.asarray(a), np.asarray(b)))
    return max(distances.min(axis=1).max(), distances.min(axis=0).max())


class MatrixTests(SimpleTestCase):
    def test_shift_matrix_diagonal(self):
        assert_allclose(np.diag(shift_matrix(4)), [1, 1 / 3, -1 / 3, -1])
        self.assertEqual(np.trace(shift_matrix(5)), 0)

    def test_twister_matrix_layout(self):
        t = twister_matrix(3, 2, 0.4)
        expected = np.array([[0, 0, np.exp(0.8j)], [1, 0, 0], [0, 1, 0]])
        assert_allclose(t, expected)

    def test_invalid_dimensions(self):
        with self.assertRaises(InvalidDimension):
            shift_matrix(1)
        with self.assertRaises(InvalidDimension):
            twister_matrix(3, 0, 0.0)
        with self.assertRaises(InvalidDimension):
            TwisterSpec(2, 0.5j, ())

    def test_standard_models(self):
        spec = TwisterSpec.two_band(0.5338, 0.6)
        self.assertTrue(spec.is_standard)
        self.assertEqual(spec.parameters, (0.5338, 0.6))
        h = build_hamiltonian(spec, 0.0)
        assert_allclose(h, [[0.5338j, 1.6], [1.6, -0.5338j]])
        self.assertFalse(TwisterSpec(3, 0.2j, (1.0,)).is_standard)

    def test_spec_dict_round_trip(self):
        spec = TwisterSpec(3, 0.2 + 0.1j, (1.1, 0.5j))
        self.assertEqual(TwisterSpec.from_dict(spec.to_dict()), spec)

    def test_momentum_grid(self):
        grid = momentum_grid(5)
        self.assertEqual(grid[0], 0.0)
        self.assertAlmostEqual(grid[-1], 2 * np.pi)
        with self.assertRaises(InvalidDimension):
            momentum_grid(2)

    @override_settings(KNOTBANDS={'K_POINTS': 17})
    def test_momentum_grid_default_from_settings(self):
        self.assertEqual(len(momentum_grid()), 17)


class SpectrumTests(SimpleTestCase):
    def test_analytic_two_band_matches_eigensolver(self):
        rng = np.random.default_rng(20)
        for m0, m1, k in rng.uniform(-2.5, 2.5, size=(20, 3)):
            h = build_hamiltonian(TwisterSpec.two_band(m0, m1), k)
            self.assertLess(set_distance(np.linalg.eigvals(h), analytic_spectrum_2band(m0, m1, k)), 1e-9)

    def test_analytic_four_band_matches_eigensolver(self):
        rng = np.random.default_rng(21)
        for m0, m1, k in rng.uniform(-2.5, 2.5, size=(20, 3)):
            h = build_hamiltonian(TwisterSpec.four_band(m0, m1), k)
            self.assertLess(set_distance(np.linalg.eigvals(h), analytic_spectrum_4band(m0, m1, k)), 1e-8)

    def test_pure_twister_roots(self):
        for n, v in ((2, 1), (3, 2), (4, 2), (5, 3)):
            k = 1.234
            energies = pure_twister_eigenvalues(n, v, k)
            assert_allclose(energies ** n, np.exp(1j * v * k) * np.ones(n), atol=1e-12)
            self.assertLess(set_distance(energies, np.linalg.eigvals(twister_matrix(n, v, k))), 1e-9)

    def test_torus_link_components(self):
        link = torus_link_components(2, 4)
        self.assertEqual(link.components, 2)
        self.assertEqual(link.component_type, (1, 2))
        self.assertEqual(torus_link_components(3, 2).components, 1)

    def test_torus_embedding_lies_on_torus(self):
        for j in range(3):
            x, y, z = torus_embedding(3, 2, j, 0.9)
            self.assertAlmostEqual((np.hypot(x, y) - 2) ** 2 + z ** 2, 1.0)


class PhaseRegionTests(SimpleTestCase):
    def test_published_anchors(self):
        for (m0, m1), label in ANCHORS_2BAND:
            self.assertEqual(phase_region(2, m0, m1).label, label)
        for (m0, m1), label in ANCHORS_4BAND:
            self.assertEqual(phase_region(4, m0, m1).label, label)

    def test_anchor_labels_survive_jitter(self):
        for n_bands, anchors in ((2, ANCHORS_2BAND), (4, ANCHORS_4BAND)):
            for (m0, m1), label in anchors:
                for d0, d1 in ((1e-6, 0), (-1e-6, 0), (0, 1e-6), (0, -1e-6)):
                    self.assertEqual(phase_region(n_bands, m0 + d0, m1 + d1).label, label)

    def test_spectral_classifier_agrees_with_two_band_anchors(self):
        for (m0, m1), label in ANCHORS_2BAND:
            self.assertEqual(spectral_class_2band(m0, m1), label)

    def test_on_boundary(self):
        # (m1 + 1)^2 = m0^2
        with self.assertRaises(OnBoundary):
            phase_region(2, 1.6, 0.6)

    def test_degenerate_point(self):
        with self.assertRaises(DegeneratePoint):
            phase_region(4, 0.0, -1.0)

    def test_sign_pattern_is_reported(self):
        region = phase_region(2, 0.5338, 0.6)
        self.assertEqual(len(region.boundary_values), 3)
        self.assertEqual(region.pattern, (1, -1, 1))

    def test_region_grid_follows_settings(self):
        default = region_grid(2)
        with override_settings(KNOTBANDS={'PHASE_GRID_STEP': 0.1, 'PHASE_GRID_EXTENT': 3.0}):
            coarse = region_grid(2)
            self.assertIsNot(coarse, default)
            self.assertEqual((coarse.step, coarse.extent, coarse.count), (0.1, 3.0, 60))
            self.assertIs(region_grid(2), coarse)
            self.assertEqual(phase_region(2, 0.5338, 0.6).label, KnotClass.HOPF_LINK)
        self.assertIs(region_grid(2), default)

    def test_spectral_fallback_leaves_anchor_labels_alone(self):
        grid = region_grid(2)
        anchors = dict(grid.labels)
        for m0, m1 in ((3.5, 3.5), (-3.5, -3.5), (0.2, -3.5)):
            self.assertEqual(phase_region(2, m0, m1).label, spectral_class_2band(m0, m1))
        self.assertEqual(grid.labels, anchors)

    def test_incomplete_phase_raster(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'phase_diagram.csv'
            path.write_text('m0,m1,label\n0.0,0.0,Unknot\n0.0,1.0,Unknot\n1.0,0.0,Unlink\n', encoding='utf-8')
            with self.assertRaises(MalformedTable):
                read_phase_raster(path)

    def test_default_evolution_time(self):
        self.assertEqual(default_evolution_time(KnotClass.UNKNOT_PLUS_UNLINK), 25.0)
        self.assertEqual(default_evolution_time(KnotClass.SOLOMON_KNOT), 20.0)
