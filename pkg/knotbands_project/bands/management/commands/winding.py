import logging

from bands.braidtrace import (
    default_reference,
    detect_crossings,
    eigen_series,
    phase_shift,
    trajectories_from_series,
    winding_matrix,
    winding_trace,
    write_crossings,
    write_trajectories,
    write_winding,
)
from bands.choices import match_winding_signature
from bands.twister import momentum_grid

from ._base import ModelCommand

logger = logging.getLogger('bands.commands')

SOURCES = ('protocol', 'eig')


class Command(ModelCommand):
    help = 'Траектории Λ, числа намоток, пересечения и топологическая матрица намоток'
    name = 'winding'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--source', choices=SOURCES, default='protocol',
                            help='Состояния из протокола измерений или из диагонализации')
        parser.add_argument('--strict', action='store_true')

    def is_exact(self, config, kwargs):
        return kwargs.get('source') == 'eig' or self.shot_config(config).exact

    def band_series(self, config, k_grid, directory, outputs, kwargs):
        if kwargs.get('source') == 'eig':
            with self.stage('eig'):
                return eigen_series(config['twister'], k_grid)
        config['t'] = self.evolution_time(config)
        _, series = self.measured_series(config, k_grid, directory, outputs, kwargs.get('strict'))
        return series

    def winding_outputs(self, config, kwargs):
        """Общая часть команд winding и braid"""
        directory = self.output_dir(config.get('out'))
        k_grid = momentum_grid(config['k_points'])
        outputs = []
        series = self.band_series(config, k_grid, directory, outputs, kwargs)
        exact = self.is_exact(config, kwargs)
        with self.stage('braidtrace'):
            trajectories = trajectories_from_series(series)
            permutation = self.band_permutation(series)
            if not exact:
                trajectories = trajectories.closed(permutation)
            trace = winding_trace(trajectories)
            shifted = phase_shift(trace, default_reference(trace))
            crossings = detect_crossings(shifted, permutation, strict=kwargs.get('strict'), exact=exact)
            matrix = winding_matrix(trace, permutation, exact=exact)
        n = matrix.shape[0]
        label = match_winding_signature([matrix[i, j] for i in range(n) for j in range(i + 1, n)], n)
        outputs += [
            write_trajectories(directory / 'trajectories.csv', trajectories),
            write_winding(directory / 'winding.csv', shifted),
            write_crossings(directory / 'crossings.csv', crossings),
            self.write_json(directory / 'winding_matrix.json', {
                'matrix': matrix.tolist(),
                'permutation': list(permutation.mapping),
                'class': str(label) if label else None,
            }),
        ]
        return directory, outputs, trajectories, permutation, matrix, label

    def run(self, **kwargs):
        config = self.load_config(kwargs)
        directory, outputs, _, _, matrix, label = self.winding_outputs(config, kwargs)
        self.write_manifest(directory, outputs, config, source=kwargs.get('source'))
        self.stdout.write(f'Матрица намоток: {matrix.tolist()}; класс: {label or "не определён"}')
