import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase, TestCase
from numpy.testing import assert_allclose

from bands.braidtrace import (
    eigen_series,
    free_reduce,
    permutation_matrix,
    trace_braid,
    trajectories_from_series,
    winding_trace,
)
from bands.choices import KnotClass, RunMode
from bands.circuit import ShotConfig, run_protocol
from bands.exceptions import KnotBandsError
from bands.knots import classify_link
from bands.reconstruct import fidelity, reconstruct_series
from bands.twister import TwisterSpec, momentum_grid

HEADLINE = (
    ('2band', 0.5338, 0.6, 's1 s1', 'HopfLink'),
    ('2band', 1.273, 0.6, 's1', 'Unknot'),
    ('2band', 1.8889, 0.6, '', 'Unlink'),
    ('4band', -0.5, -0.4, 's1 s3 s2 s1 s3 s2', 'SolomonKnot'),
    ('4band', 2.0, 1.1, 's1 s3 s1 s3 s2', 'HopfChain'),
)


def run(name, out, **options):
    call_command(name, out=str(out), stdout=StringIO(), **options)
    return out


def read_json(path):
    return json.loads(Path(path).read_text(encoding='utf-8'))


class SimulatePipelineTests(TestCase):
    """Полный протокол в точном режиме на опорных точках фазовых диаграмм"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_headline_points(self):
        for model, m0, m1, word, label in HEADLINE:
            with self.subTest(model=model, m0=m0, m1=m1):
                out = run('simulate', self.root / f'{model}_{m0}_{m1}',
                          model=model, m0=m0, m1=m1, exact=True)
                summary = read_json(out / 'summary.json')
                self.assertEqual(summary['braid_word_reduced'], word)
                self.assertEqual(summary['class'], label)
                self.assertGreater(summary['min_fidelity'], 0.999)
                self.assertEqual(summary['mode'], 'exact')
                for name in ('measurements.jsonl', 'states.csv', 'trajectories.csv', 'winding.csv',
                             'crossings.csv', 'braid.txt', 'manifest.json'):
                    self.assertTrue((out / name).exists(), name)

    def test_two_band_swap_invariants(self):
        out = run('simulate', self.root / 'hopf', model='2band', m0=0.5338, m1=0.6, exact=True)
        summary = read_json(out / 'summary.json')
        self.assertEqual(summary['band_swaps'], 2)
        self.assertEqual(summary['berry_phase'], 0)
        self.assertEqual(summary['winding_matrix'], [[0.0, 1.0], [1.0, 0.0]])

    def test_solomon_winding_matrix_is_half_integer(self):
        out = run('simulate', self.root / 'solomon', model='4band', m0=-0.5, m1=-0.4, exact=True)
        matrix = np.array(read_json(out / 'summary.json')['winding_matrix'])
        assert_allclose(np.abs(matrix[~np.eye(4, dtype=bool)]), 0.5, atol=1e-9)

    def test_rerun_from_manifest(self):
        first = run('simulate', self.root / 'first', model='2band', m0=1.273, m1=0.6, exact=True)
        second = run('simulate', self.root / 'second', config=str(first / 'manifest.json'))
        self.assertEqual(read_json(first / 'summary.json'), read_json(second / 'summary.json'))
        self.assertEqual((first / 'measurements.jsonl').read_bytes(),
                         (second / 'measurements.jsonl').read_bytes())

    def test_sampled_hopf_link(self):
        out = run('simulate', self.root / 'sampled', model='2band', m0=0.5338, m1=0.6,
                  shots=40000, seed=11, workers=1)
        summary = read_json(out / 'summary.json')
        self.assertEqual(summary['mode'], 'sampled')
        self.assertEqual(summary['class'], 'HopfLink')


class WindingPipelineTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_winding_matrix_from_eigenvectors(self):
        out = run('winding', self.root / 'solomon', model='4band', m0=-0.5, m1=-0.4, source='eig')
        result = read_json(out / 'winding_matrix.json')
        self.assertEqual(result['class'], 'SolomonKnot')
        self.assertFalse((out / 'measurements.jsonl').exists())

    def test_braid_from_protocol(self):
        out = run('braid', self.root / 'chain', model='4band', m0=2.0, m1=1.1, exact=True, reduce=True)
        lines = (out / 'braid.txt').read_text(encoding='utf-8').splitlines()
        self.assertIn('word: s1 s3 s1 s3 s2', lines)
        self.assertIn('strands: 4', lines)


def sampled_states(spec, seed, k_grid, t=20.0):
    cfg = ShotConfig(shots=40000, seed=seed, mode=RunMode.SAMPLED)
    records = run_protocol(spec, k_grid, t, cfg, workers=1)
    series = reconstruct_series(records, spec.n_bands)
    bands = sorted(series)
    permutation = permutation_matrix([series[b][0] for b in bands], [series[b][-1] for b in bands])
    return series, permutation


class SampledHopfTests(SimpleTestCase):
    """Статистика по зёрнам для выборочного протокола в точке зацепления Хопфа"""
    seeds = range(20)

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.spec = TwisterSpec.two_band(0.5338, 0.6)
        cls.k_grid = momentum_grid(100)
        cls.ideal = eigen_series(cls.spec, cls.k_grid)
        cls.runs = {seed: sampled_states(cls.spec, seed, cls.k_grid) for seed in cls.seeds}

    def test_raw_winding_reaches_one(self):
        finals = [
            winding_trace(trajectories_from_series(self.runs[seed][0])).values[(0, 1)][-1]
            for seed in range(5)
        ]
        self.assertLess(abs(np.median(finals) - 1.0), 0.02)

    def test_median_infidelity(self):
        medians = []
        for seed in self.seeds:
            series, _ = self.runs[seed]
            losses = [
                1 - fidelity(state, ideal)
                for band in series
                for state, ideal in zip(series[band], self.ideal[band])
            ]
            medians.append(np.median(losses))
        self.assertLessEqual(np.median(medians), 1e-3)

    def test_braid_word_is_recovered(self):
        recovered = 0
        for seed in self.seeds:
            series, permutation = self.runs[seed]
            try:
                result = trace_braid(trajectories_from_series(series), permutation, reduce=True, exact=False)
            except KnotBandsError:
                continue
            recovered += str(result.word) == 's1 s1'
        self.assertGreaterEqual(recovered, 19)


class SampledSolomonTests(SimpleTestCase):
    def test_solomon_knot_over_seeds(self):
        spec = TwisterSpec.four_band(-0.5, -0.4)
        k_grid = momentum_grid(100)
        recovered = 0
        for seed in range(5):
            try:
                series, permutation = sampled_states(spec, seed, k_grid)
                result = trace_braid(trajectories_from_series(series), permutation, exact=False)
                label = classify_link(free_reduce(result.word))
            except KnotBandsError:
                continue
            recovered += label == KnotClass.SOLOMON_KNOT
        self.assertGreaterEqual(recovered, 3)
