import json
import logging
from pathlib import Path

from django.db import DatabaseError, models
from django.utils import timezone

from . import __version__
from .choices import RunMode

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


class RunManifest(models.Model):
    """Паспорт запуска: всё, что нужно, чтобы повторить расчёт"""
    command = models.CharField('Команда', max_length=50)
    spec = models.JSONField('Модель', default=dict, blank=True)
    k_points = models.PositiveIntegerField('Точек по k', null=True, blank=True)
    t = models.FloatField('Время эволюции', null=True, blank=True)
    shots = models.PositiveIntegerField('Число шотов', null=True, blank=True)
    seed = models.BigIntegerField('Зерно генератора', null=True, blank=True)
    mode = models.CharField('Режим', max_length=10, choices=RunMode.choices, blank=True)
    options = models.JSONField('Прочие параметры', default=dict, blank=True)
    output_dir = models.CharField('Каталог результатов', max_length=500, blank=True)
    outputs = models.JSONField('Файлы результатов', default=list, blank=True)
    tool_version = models.CharField('Версия', max_length=20, default=__version__)
    created_at = models.DateTimeField('Дата запуска', default=timezone.now)

    class Meta:
        verbose_name = 'Запуск'
        verbose_name_plural = 'Запуски'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['-created_at'], name='bands_runma_created_5d6c1e_idx'),
            models.Index(fields=['command'], name='bands_runma_command_8b2f40_idx'),
        ]

    def __str__(self):
        return f'{self.command} @ {self.created_at:%Y-%m-%d %H:%M:%S}'

    @property
    def exact(self):
        return self.mode == RunMode.EXACT

    def as_dict(self):
        """Словарь в формате файла конфигурации команд"""
        data = {
            'command': self.command,
            'spec': self.spec,
            'k_points': self.k_points,
            't': self.t,
            'shots': self.shots,
            'seed': self.seed,
            'mode': self.mode,
            'exact': self.exact,
            'outputs': list(self.outputs),
            'tool_version': self.tool_version,
            'created_at': self.created_at.isoformat(),
        }
        data.update(self.options)
        return data

    def write_json(self, directory):
        path = Path(directory) / MANIFEST_NAME
        path.write_text(json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + '\n', encoding='utf-8')
        return path

    @classmethod
    def record(cls, command, directory, outputs, spec=None, **fields):
        """Сохраняет паспорт в базе и рядом с результатами"""
        directory = Path(directory)
        manifest = cls(
            command=command,
            spec=spec.to_dict() if spec is not None else {},
            output_dir=str(directory),
            outputs=[str(Path(path).relative_to(directory)) for path in outputs],
            **fields,
        )
        try:
            manifest.save()
        except DatabaseError as exc:
            logger.warning('manifest not stored in the database (run "manage.py migrate"): %s', exc)
        manifest.write_json(directory)
        return manifest
