import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from bands.choices import RunMode
from bands.circuit import (
    SETTINGS,
    ShotConfig,
    apply_measurement_rotations,
    block_embed,
    group_records,
    nonunitary_evolution,
    qubit_axes,
    read_records,
    run_protocol,
    select_rotation_angle,
    simulate_measurement,
    write_records,
)
from bands.exceptions import ConfigError, IncompleteSettings, WeakSelectivity
from bands.twister import TwisterSpec, build_hamiltonian


class SettingsTests(SimpleTestCase):
    def test_settings_per_model(self):
        self.assertEqual(SETTINGS[2], ('x', 'y', 'z'))
        self.assertEqual(len(SETTINGS[4]), 12)

    def test_qubit_axes(self):
        self.assertEqual(qubit_axes('A:x', 4), ('z', 'x'))
        self.assertEqual(qubit_axes('B:y', 4), ('z', 'y'))
        self.assertEqual(qubit_axes('AB:y', 4), ('y', 'z'))
        self.assertEqual(qubit_axes('AB0:z', 4), ('z', 'z'))
        self.assertEqual(qubit_axes('x', 2), ('x',))
        with self.assertRaises(IncompleteSettings):
            qubit_axes('C:x', 4)

    def test_shot_config_validation(self):
        with self.assertRaises(ConfigError):
            ShotConfig(mode='bogus')
        with self.assertRaises(ConfigError):
            ShotConfig(shots=0, mode=RunMode.SAMPLED)


class EmbeddingTests(SimpleTestCase):
    def test_postselection_reproduces_scaled_evolution(self):
        rng = np.random.default_rng(7)
        for n_bands, factory in ((2, TwisterSpec.two_band), (4, TwisterSpec.four_band)):
            for _ in range(5):
                m0, m1 = rng.uniform(-2, 2, size=2)
                k, rotation = rng.uniform(0, 2 * np.pi, size=2)
                u_h = nonunitary_evolution(build_hamiltonian(factory(m0, m1), k), 2.0, rotation)
                embedded = block_embed(u_h)
                u = embedded.u_matrix
                assert_allclose(u.conj().T @ u, np.eye(2 * n_bands), atol=1e-10)
                for _ in range(10):
                    state = rng.normal(size=n_bands) + 1j * rng.normal(size=n_bands)
                    state /= np.linalg.norm(state)
                    full = u @ np.concatenate([state, np.zeros(n_bands)])
                    assert_allclose(full[:n_bands], embedded.scale_u * u_h @ state, atol=1e-8)

    def test_scale_bounds_operator_norm(self):
        u_h = nonunitary_evolution(build_hamiltonian(TwisterSpec.two_band(0.5338, 0.6), 1.0), 3.0)
        embedded = block_embed(u_h)
        self.assertAlmostEqual(np.linalg.norm(embedded.scale_u * u_h, 2), 1.0, places=10)


class MeasurementTests(SimpleTestCase):
    def setUp(self):
        spec = TwisterSpec.two_band(0.5338, 0.6)
        u_h = nonunitary_evolution(build_hamiltonian(spec, 0.3), 20.0)
        self.rotated = apply_measurement_rotations(block_embed(u_h), ('x',))

    def test_exact_probabilities_are_normalized(self):
        record = simulate_measurement(self.rotated, ShotConfig(mode=RunMode.EXACT), setting='x')
        self.assertAlmostEqual(sum(record.probabilities().values()), 1.0)
        self.assertTrue(0.0 <= record.discarded_fraction < 1.0)
        self.assertTrue(all(bits.startswith('0') for bits in record.counts))

    def test_discarded_fraction_is_the_ancilla_one_weight(self):
        spec = TwisterSpec.four_band(-0.5, -0.4)
        for k, t in ((0.3, 2.0), (1.7, 5.0), (4.1, 20.0)):
            u_h = nonunitary_evolution(build_hamiltonian(spec, k), t)
            embedded = block_embed(u_h)
            for setting in ('A:x', 'AB:y'):
                rotated = apply_measurement_rotations(embedded, qubit_axes(setting, 4))
                record = simulate_measurement(rotated, ShotConfig(mode=RunMode.EXACT), setting=setting)
                expected = 1 - embedded.scale_u ** 2 * np.linalg.norm(u_h[:, 0]) ** 2
                self.assertAlmostEqual(record.discarded_fraction, expected, places=10)

    def test_sampled_counts_are_reproducible(self):
        cfg = ShotConfig(shots=1000, seed=5, mode=RunMode.SAMPLED)
        first = simulate_measurement(self.rotated, cfg, rng=np.random.default_rng(cfg.seed_sequence(1)))
        second = simulate_measurement(self.rotated, cfg, rng=np.random.default_rng(cfg.seed_sequence(1)))
        self.assertEqual(first.counts, second.counts)
        self.assertLessEqual(first.retained, 1000)
        self.assertTrue(all(isinstance(n, int) for n in first.counts.values()))

    def test_record_dict_round_trip(self):
        record = simulate_measurement(self.rotated, ShotConfig(), k=0.3, band=1, setting='x')
        with tempfile.TemporaryDirectory() as tmp:
            path = write_records(Path(tmp) / 'records.jsonl', [record])
            self.assertEqual(read_records(path), [record])


class RotationSelectionTests(SimpleTestCase):
    def test_weak_selectivity_for_short_evolution(self):
        with self.assertRaises(WeakSelectivity):
            select_rotation_angle(TwisterSpec.two_band(0.5338, 0.6), 0.0, 1e-3, band=0, n_samples=72)

    def test_selection_isolates_each_band(self):
        spec = TwisterSpec.two_band(0.5338, 0.6)
        angles = [select_rotation_angle(spec, 1.0, 20.0, band) for band in range(2)]
        self.assertNotEqual(angles[0], angles[1])


class ProtocolTests(SimpleTestCase):
    def test_record_layout(self):
        spec = TwisterSpec.two_band(0.5338, 0.6)
        grid = np.linspace(0.0, 2 * np.pi, 4)
        records = run_protocol(spec, grid, 20.0, ShotConfig(), n_samples=120)
        self.assertEqual(len(records), 4 * 2 * 3)
        k_values, groups = group_records(records)
        assert_allclose(k_values, grid)
        self.assertEqual(set(groups[(0, 1)]), set(SETTINGS[2]))

    def test_sampled_run_does_not_depend_on_workers(self):
        spec = TwisterSpec.four_band(-0.5, -0.4)
        grid = np.linspace(0.0, 2 * np.pi, 3)
        cfg = ShotConfig(shots=2000, seed=11, mode=RunMode.SAMPLED)
        serial = run_protocol(spec, grid, 20.0, cfg, n_samples=180)
        parallel = run_protocol(spec, grid, 20.0, cfg, workers=2, n_samples=180)
        self.assertEqual([r.counts for r in serial], [r.counts for r in parallel])
