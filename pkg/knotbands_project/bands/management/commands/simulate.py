import logging

import numpy as np

from bands.braidtrace import (
    count_band_swaps_2band,
    eigen_series,
    free_reduce,
    global_biorthogonal_berry_phase,
    trace_braid,
    trajectories_from_series,
    winding_matrix,
    write_braid,
    write_crossings,
    write_trajectories,
    write_winding,
)
from bands.exceptions import SpecialLine
from bands.knots import classify_link, link_invariants
from bands.reconstruct import fidelity
from bands.twister import momentum_grid

from ._base import ModelCommand

logger = logging.getLogger('bands.commands')


class Command(ModelCommand):
    help = 'Полный протокол: измерения, восстановление состояний, намотки, коса и инварианты узла'
    name = 'simulate'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--strict', action='store_true',
                            help='Прерывать расчёт на вырожденных фазах и пустых секторах')

    def run(self, **kwargs):
        config = self.load_config(kwargs)
        config['t'] = self.evolution_time(config)
        spec = config['twister']
        directory = self.output_dir(config.get('out'))
        k_grid = momentum_grid(config['k_points'])
        exact = self.shot_config(config).exact
        outputs = []

        records, series = self.measured_series(config, k_grid, directory, outputs, kwargs.get('strict'))

        with self.stage('braidtrace'):
            trajectories = trajectories_from_series(series)
            permutation = self.band_permutation(series)
            braid = trace_braid(trajectories, permutation, strict=kwargs.get('strict'), exact=exact)
            matrix = winding_matrix(braid.trace, permutation, exact=exact)
            reduced = free_reduce(braid.word)
            outputs += [
                write_trajectories(directory / 'trajectories.csv', trajectories),
                write_winding(directory / 'winding.csv', braid.shifted),
                write_crossings(directory / 'crossings.csv', braid.crossings),
                write_braid(directory / 'braid.txt', braid.word, reduced),
            ]

        with self.stage('knots'):
            invariants = link_invariants(reduced, workers=config['workers'])
            label = classify_link(reduced, winding=matrix, workers=config['workers'])

        reference = eigen_series(spec, k_grid)
        worst = min(
            fidelity(state, ideal)
            for band in series
            for state, ideal in zip(series[band], reference[band])
        )
        summary = {
            'spec': spec.to_dict(),
            'k_points': len(k_grid),
            't': config['t'],
            'mode': str(config['mode']),
            'braid_word': str(braid.word),
            'braid_word_reduced': str(reduced),
            'permutation': list(permutation.mapping),
            'winding_matrix': matrix.tolist(),
            'class': str(label),
            'min_fidelity': worst,
            'discarded_fraction': float(np.mean([r.discarded_fraction for r in records])),
            'flags': [list(flag) for flag in braid.flags],
            **{key: invariants[key] for key in ('writhe', 'bracket', 'alexander', 'jones')},
        }
        if spec.is_standard and spec.n_bands == 2:
            m0, m1 = spec.parameters
            try:
                summary['band_swaps'] = count_band_swaps_2band(m0, m1)
                summary['berry_phase'] = global_biorthogonal_berry_phase(spec, k_grid)
            except SpecialLine as exc:
                logger.warning('band-swap invariants skipped: %s', exc)

        outputs.append(self.write_json(directory / 'summary.json', summary))
        self.write_manifest(directory, outputs, config, strict=bool(kwargs.get('strict')))
        self.stdout.write(f'Коса: {reduced or "пустое слово"}; класс: {label}; Джонс: {summary["jones"]}')
