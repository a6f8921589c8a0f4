import csv
import logging

import numpy as np

from bands.choices import Model
from bands.exceptions import ClassificationError, ConfigError, Unclassified
from bands.plotting import boundary_polylines, plot_phase_diagram
from bands.twister import boundary_fields, phase_region, write_phase_raster

from ._base import KnotBandsCommand

logger = logging.getLogger('bands.commands')

BOUNDARY = 'boundary'
N_BANDS = {Model.TWO_BAND.value: 2, Model.FOUR_BAND.value: 4}


def boundary_cells(n_bands, m0_edges, m1_edges):
    """Ячейки, в которых активная граничная функция меняет знак между углами"""
    m0, m1 = np.meshgrid(m0_edges, m1_edges, indexing='ij')
    values, active = boundary_fields(n_bands, m0, m1)
    signs = np.where(active, np.sign(values), 0)
    corners = [signs[:, :-1, :-1], signs[:, 1:, :-1], signs[:, :-1, 1:], signs[:, 1:, 1:]]
    differs = np.zeros(corners[0].shape, dtype=bool)
    for corner in corners[1:]:
        differs |= corner != corners[0]
    return differs.any(axis=0)


class Command(KnotBandsCommand):
    help = 'Растр фазовой диаграммы по (m0, m1) и граничные кривые'
    name = 'phase_diagram'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--model', choices=list(N_BANDS), default=Model.TWO_BAND.value)
        parser.add_argument('--window', type=float, nargs=4, default=[-3.0, 3.0, -3.0, 3.0],
                            metavar=('M0_MIN', 'M0_MAX', 'M1_MIN', 'M1_MAX'))
        parser.add_argument('--resolution', type=int, default=50, help='Ячеек по каждой оси')
        parser.add_argument('--jitter', type=float, default=0.0, help='Сдвиг центров ячеек')

    def run(self, **kwargs):
        n_bands = N_BANDS[kwargs['model']]
        m0_min, m0_max, m1_min, m1_max = kwargs['window']
        resolution = kwargs['resolution']
        if resolution < 1 or m0_max <= m0_min or m1_max <= m1_min:
            raise ConfigError('empty parameter window', window=kwargs['window'])
        m0_edges = np.linspace(m0_min, m0_max, resolution + 1)
        m1_edges = np.linspace(m1_min, m1_max, resolution + 1)
        m0_values = (m0_edges[:-1] + m0_edges[1:]) / 2 + kwargs['jitter']
        m1_values = (m1_edges[:-1] + m1_edges[1:]) / 2 + kwargs['jitter']
        on_boundary = boundary_cells(n_bands, m0_edges, m1_edges)

        labels = []
        with self.stage('classify'):
            for i, m0 in enumerate(m0_values):
                for j, m1 in enumerate(m1_values):
                    if on_boundary[i, j]:
                        labels.append(BOUNDARY)
                        continue
                    try:
                        labels.append(str(phase_region(n_bands, float(m0), float(m1)).label))
                    except Unclassified as exc:
                        logger.warning('cell (%.4f, %.4f) left unclassified: %s', m0, m1, exc)
                        labels.append('')
                    except ClassificationError:
                        labels.append(BOUNDARY)

        directory = self.output_dir(kwargs.get('out'))
        outputs = [write_phase_raster(directory / 'phase_diagram.csv', m0_values, m1_values, labels)]
        path = directory / 'boundaries.csv'
        with path.open('w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream)
            writer.writerow(['boundary', 'segment', 'm0', 'm1'])
            fine_m0 = np.linspace(m0_min, m0_max, 4 * resolution + 1)
            fine_m1 = np.linspace(m1_min, m1_max, 4 * resolution + 1)
            for index, (name, segment) in enumerate(boundary_polylines(n_bands, fine_m0, fine_m1)):
                for m0, m1 in segment:
                    writer.writerow([name, index, repr(float(m0)), repr(float(m1))])
        outputs.append(path)
        outputs.append(plot_phase_diagram(
            m0_values, m1_values, ['' if label == BOUNDARY else label for label in labels],
            directory / 'phase_diagram.svg'))

        self.write_manifest(directory, outputs, model=kwargs['model'], window=list(kwargs['window']),
                            resolution=resolution, jitter=kwargs['jitter'])
        found = sorted({label for label in labels if label and label != BOUNDARY})
        self.stdout.write(f'Классы: {", ".join(found)}; граничных ячеек: {labels.count(BOUNDARY)}')
