from bands.exceptions import InvalidDimension
from bands.twister import torus_link_components, write_torus

from ._base import KnotBandsCommand


class Command(KnotBandsCommand):
    help = 'Кривые чистого твистера на торе и число компонент торического зацепления'
    name = 'torus_export'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--n', type=int, required=True, help='Число зон')
        parser.add_argument('--v', type=int, required=True, help='Номер гармоники')
        parser.add_argument('--samples', type=int, default=400)

    def run(self, **kwargs):
        n, v, samples = kwargs['n'], kwargs['v'], kwargs['samples']
        if samples < 2:
            raise InvalidDimension('torus export needs at least two samples', samples=samples)
        link = torus_link_components(v, n)
        directory = self.output_dir(kwargs.get('out'))
        outputs = [
            write_torus(directory / 'torus.csv', n, v, samples),
            self.write_json(directory / 'torus.json', {
                'n': n,
                'v': v,
                'components': link.components,
                'component_type': list(link.component_type),
            }),
        ]
        self.write_manifest(directory, outputs, n=n, v=v, samples=samples)
        p, q = link.component_type
        self.stdout.write(f'T({v},{n}): {link.components} компонент(ы) типа T({p},{q})')
