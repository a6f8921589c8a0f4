"""Общая часть management-команд: флаги, конфигурация, стадии и паспорт запуска."""
import json
import logging
import os
from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from bands.braidtrace import permutation_matrix
from bands.circuit import ShotConfig, run_protocol, write_records
from bands.choices import Model
from bands.conf import get_setting
from bands.exceptions import ClassificationError, ConfigError, KnotBandsError
from bands.forms import RunConfigForm
from bands.models import RunManifest
from bands.reconstruct import reconstruct_series, write_states
from bands.twister import default_evolution_time, phase_region

logger = logging.getLogger('bands.commands')

CONFIG_KEYS = (
    'model', 'm0', 'm1', 'n_bands', 'harmonics', 'k_points', 't', 'shots', 'seed', 'exact', 'out',
    'workers',
)


class KnotBandsCommand(BaseCommand):
    """Базовая команда: переводит ошибки приложения в CommandError с кодом семейства"""
    name = None

    def add_arguments(self, parser):
        parser.add_argument('--out', help='Каталог результатов')
        parser.add_argument('--workers', type=int, help='Число процессов (по умолчанию все ядра)')

    def handle(self, *args, **kwargs):
        try:
            self.run(**kwargs)
        except KnotBandsError as exc:
            stage = getattr(exc, 'stage', None)
            message = f'{stage}: {exc}' if stage else str(exc)
            raise CommandError(message, returncode=exc.exit_code) from exc

    def run(self, **kwargs):
        raise NotImplementedError

    @contextmanager
    def stage(self, name):
        logger.info('%s: stage %s', self.name, name)
        try:
            yield
        except KnotBandsError as exc:
            exc.stage = name
            raise

    def output_dir(self, out=None):
        directory = Path(out) if out else Path(get_setting('OUTPUT_DIR')) / self.name
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def workers(self, value=None):
        return value or get_setting('WORKERS') or os.cpu_count() or 1

    def write_json(self, path, data):
        path = Path(path)
        path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + '\n', encoding='utf-8')
        return path

    def write_manifest(self, directory, outputs, config=None, **options):
        fields = {}
        spec = None
        if config is not None:
            spec = config['twister']
            fields = {
                'k_points': config['k_points'],
                't': config.get('t'),
                'shots': config.get('shots'),
                'seed': config.get('seed'),
                'mode': config.get('mode', ''),
            }
        manifest = RunManifest.record(self.name, directory, outputs, spec=spec, options=options, **fields)
        self.stdout.write(f'Результаты: {directory}')
        return manifest


class ModelCommand(KnotBandsCommand):
    """Команда, работающая с моделью твистера и сеткой по k"""

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--model', choices=Model.values, help='Модель твистера')
        parser.add_argument('--m0', type=float)
        parser.add_argument('--m1', type=float)
        parser.add_argument('--n-bands', type=int, help='Число зон модели custom')
        parser.add_argument('--harmonics', help='Гармоники модели custom через запятую, например "1.1,1"')
        parser.add_argument('--k-points', type=int, help='Число точек сетки по k')
        parser.add_argument('--t', type=float, help='Время неунитарной эволюции')
        parser.add_argument('--shots', type=int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--exact', action='store_true', default=None,
                            help='Точные вероятности вместо выборки по шотам')
        parser.add_argument('--config', help='JSON-файл с теми же ключами, что и флаги')

    def load_config(self, kwargs):
        """Файл конфигурации, поверх него явно заданные флаги"""
        data = {}
        if kwargs.get('config'):
            try:
                data = json.loads(Path(kwargs['config']).read_text(encoding='utf-8'))
            except (OSError, ValueError) as exc:
                raise ConfigError('cannot read config file', path=kwargs['config'], reason=str(exc))
            if not isinstance(data, dict):
                raise ConfigError('config file must hold a JSON object', path=kwargs['config'])
        for key in CONFIG_KEYS:
            if kwargs.get(key) is not None:
                data[key] = kwargs[key]
        form = RunConfigForm(data)
        if not form.is_valid():
            raise ConfigError('invalid run configuration: ' + form.errors.as_text().replace('\n', ' '))
        config = form.cleaned_data
        config['workers'] = self.workers(config.get('workers'))
        logger.info('%s: %s', self.name, config['twister'])
        return config

    def evolution_time(self, config):
        if config.get('t') is not None:
            return config['t']
        spec = config['twister']
        if spec.is_standard:
            try:
                return default_evolution_time(phase_region(spec.n_bands, *spec.parameters).label)
            except ClassificationError as exc:
                logger.warning('no phase label for %s (%s), default evolution time used', spec, exc)
        return get_setting('EVOLUTION_TIME')

    def shot_config(self, config):
        return ShotConfig(shots=config['shots'], seed=config['seed'], mode=config['mode'])

    def measured_series(self, config, k_grid, directory, outputs, strict=False):
        """Протокол измерений и восстановление состояний с записью промежуточных файлов"""
        spec = config['twister']
        with self.stage('protocol'):
            records = run_protocol(spec, k_grid, config['t'], self.shot_config(config),
                                   workers=config['workers'])
            outputs.append(write_records(directory / 'measurements.jsonl', records))
        with self.stage('reconstruct'):
            series = reconstruct_series(records, spec.n_bands, strict=strict)
            outputs.append(write_states(directory / 'states.csv', series))
        return records, series

    def band_permutation(self, series):
        bands = sorted(series)
        return permutation_matrix([series[b][0] for b in bands], [series[b][-1] for b in bands])
