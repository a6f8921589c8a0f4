from bands.braidtrace import free_reduce, trace_braid, write_braid

from .winding import Command as WindingCommand


class Command(WindingCommand):
    help = 'Слово косы по пересечениям чисел намоток'
    name = 'braid'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--reduce', action='store_true', help='Свободное сокращение σσ⁻¹')

    def run(self, **kwargs):
        config = self.load_config(kwargs)
        directory, outputs, trajectories, permutation, _, _ = self.winding_outputs(config, kwargs)
        with self.stage('braidtrace'):
            braid = trace_braid(trajectories, permutation, strict=kwargs.get('strict'),
                                exact=self.is_exact(config, kwargs))
        word = free_reduce(braid.word) if kwargs.get('reduce') else braid.word
        outputs.append(write_braid(directory / 'braid.txt', word, free_reduce(braid.word)))
        self.write_manifest(directory, outputs, config,
                            source=kwargs.get('source'), reduce=bool(kwargs.get('reduce')))
        self.stdout.write(f'Коса: {word or "пустое слово"}')
