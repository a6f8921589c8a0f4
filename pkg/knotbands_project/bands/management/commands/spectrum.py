import logging

import numpy as np

from bands.twister import (
    analytic_spectrum_2band,
    analytic_spectrum_4band,
    band_decompositions,
    momentum_grid,
    write_spectrum,
)

from ._base import ModelCommand

logger = logging.getLogger('bands.commands')

ANALYTIC = {2: analytic_spectrum_2band, 4: analytic_spectrum_4band}


def set_distance(a, b):
    """Наибольшее расстояние от точки одного набора до ближайшей точки другого"""
    distances = np.abs(np.subtract.outer(np.asarray(a), np.asarray(b)))
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


class Command(ModelCommand):
    help = 'Зонная структура твистера: собственные значения вдоль k и аналитические формулы'
    name = 'spectrum'

    def run(self, **kwargs):
        config = self.load_config(kwargs)
        spec = config['twister']
        directory = self.output_dir(config.get('out'))
        k_grid = momentum_grid(config['k_points'])

        with self.stage('spectrum'):
            eigenvalues = np.array([d.eigenvalues for d in band_decompositions(spec, k_grid)])
        outputs = [write_spectrum(directory / 'spectrum.csv', k_grid, eigenvalues)]
        summary = {'spec': spec.to_dict(), 'k_points': len(k_grid), 'bands': spec.n_bands}

        if spec.is_standard:
            m0, m1 = spec.parameters
            analytic = np.array([ANALYTIC[spec.n_bands](m0, m1, k) for k in k_grid])
            outputs.append(write_spectrum(directory / 'analytic.csv', k_grid, analytic))
            deviation = max(set_distance(e, a) for e, a in zip(eigenvalues, analytic))
            summary['analytic_deviation'] = deviation
            logger.info('spectrum: analytic deviation %.3e', deviation)

        outputs.append(self.write_json(directory / 'spectrum.json', summary))
        self.write_manifest(directory, outputs, config)
        self.stdout.write(f'Спектр: {len(k_grid)} точек x {spec.n_bands} зон')
