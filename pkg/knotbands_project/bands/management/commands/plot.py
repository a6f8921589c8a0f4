import csv

from bands.braidtrace import BraidWord, read_braid, read_crossings, read_trajectories, read_winding
from bands.exceptions import ConfigError, MalformedTable
from bands.plotting import plot_braid, plot_phase_diagram, plot_torus, plot_trajectories, plot_winding
from bands.twister import read_phase_raster

from ._base import KnotBandsCommand


class Command(KnotBandsCommand):
    help = 'SVG-рисунки по таблицам: намотки с пересечениями, косы, торические кривые, траектории'
    name = 'plot'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--winding', help='winding.csv')
        parser.add_argument('--crossings', help='crossings.csv для отметок на графике намоток')
        parser.add_argument('--braid', help='braid.txt')
        parser.add_argument('--word', help='Слово косы вместо braid.txt')
        parser.add_argument('--strands', type=int)
        parser.add_argument('--trajectories', help='trajectories.csv')
        parser.add_argument('--phase', help='phase_diagram.csv')
        parser.add_argument('--torus', type=int, nargs=2, metavar=('N', 'V'))
        parser.add_argument('--samples', type=int, default=400)

    def read(self, reader, path, *args):
        try:
            return reader(path, *args)
        except (OSError, KeyError, ValueError, IndexError, csv.Error) as exc:
            raise MalformedTable('cannot read input table', path=str(path), reason=repr(exc))

    def run(self, **kwargs):
        directory = self.output_dir(kwargs.get('out'))
        outputs = []
        if kwargs.get('winding'):
            trace = self.read(read_winding, kwargs['winding'])
            crossings = self.read(read_crossings, kwargs['crossings']) if kwargs.get('crossings') else ()
            outputs.append(plot_winding(trace, directory / 'winding.svg', crossings))
        if kwargs.get('braid') or kwargs.get('word') is not None:
            if kwargs.get('braid'):
                word = self.read(read_braid, kwargs['braid'])
            else:
                word = BraidWord.parse(kwargs['word'], kwargs.get('strands'))
            outputs.append(plot_braid(word, directory / 'braid.svg'))
        if kwargs.get('trajectories'):
            trajectories = self.read(read_trajectories, kwargs['trajectories'])
            outputs.append(plot_trajectories(trajectories, directory / 'trajectories.svg'))
        if kwargs.get('phase'):
            m0_values, m1_values, labels = self.read(read_phase_raster, kwargs['phase'])
            labels = ['' if label == 'boundary' else label for label in labels]
            outputs.append(plot_phase_diagram(m0_values, m1_values, labels, directory / 'phase_diagram.svg'))
        if kwargs.get('torus'):
            n, v = kwargs['torus']
            outputs.append(plot_torus(n, v, directory / 'torus.svg', kwargs['samples']))
        if not outputs:
            raise ConfigError('nothing to plot: pass --winding, --braid, --word, --trajectories, --phase or --torus')

        self.write_manifest(directory, outputs, inputs={
            key: kwargs[key] for key in ('winding', 'crossings', 'braid', 'word', 'trajectories', 'phase', 'torus')
            if kwargs.get(key) is not None
        })
        for path in outputs:
            self.stdout.write(str(path))
