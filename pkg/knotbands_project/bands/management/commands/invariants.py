import logging

from bands.braidtrace import BraidWord
from bands.exceptions import Unclassified
from bands.knots import classify_link, link_invariants

from ._base import KnotBandsCommand

logger = logging.getLogger('bands.commands')


class Command(KnotBandsCommand):
    help = 'Инварианты замыкания косы: writhe, скобка Кауффмана, многочлены Александера и Джонса'
    name = 'invariants'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--word', default='', help='Слово косы, например "s1 s3 s2^-1"')
        parser.add_argument('--strands', type=int, help='Число нитей (по умолчанию по слову)')

    def run(self, **kwargs):
        word = BraidWord.parse(kwargs['word'], kwargs.get('strands'))
        workers = self.workers(kwargs.get('workers'))
        with self.stage('knots'):
            result = link_invariants(word, workers=workers)
            try:
                result['class'] = str(classify_link(word, workers=workers))
            except Unclassified as exc:
                logger.warning('closure not in the link table: %s', exc)
                result['class'] = None

        directory = self.output_dir(kwargs.get('out'))
        path = self.write_json(directory / 'invariants.json', result)
        self.write_manifest(directory, [path], word=str(word), strands=word.strand_count)
        for key in ('word', 'writhe', 'bracket', 'alexander', 'jones', 'class'):
            self.stdout.write(f'{key}: {result[key]}')
