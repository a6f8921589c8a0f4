import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=50, verbose_name='Команда')),
                ('spec', models.JSONField(blank=True, default=dict, verbose_name='Модель')),
                ('k_points', models.PositiveIntegerField(blank=True, null=True, verbose_name='Точек по k')),
                ('t', models.FloatField(blank=True, null=True, verbose_name='Время эволюции')),
                ('shots', models.PositiveIntegerField(blank=True, null=True, verbose_name='Число шотов')),
                ('seed', models.BigIntegerField(blank=True, null=True, verbose_name='Зерно генератора')),
                ('mode', models.CharField(blank=True, choices=[('exact', 'Точные вероятности'), ('sampled', 'Выборка по шотам')], max_length=10, verbose_name='Режим')),
                ('options', models.JSONField(blank=True, default=dict, verbose_name='Прочие параметры')),
                ('output_dir', models.CharField(blank=True, max_length=500, verbose_name='Каталог результатов')),
                ('outputs', models.JSONField(blank=True, default=list, verbose_name='Файлы результатов')),
                ('tool_version', models.CharField(default='0.1.0', max_length=20, verbose_name='Версия')),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now, verbose_name='Дата запуска')),
            ],
            options={
                'verbose_name': 'Запуск',
                'verbose_name_plural': 'Запуски',
                'ordering': ['-created_at'],
                'indexes': [
                    models.Index(fields=['-created_at'], name='bands_runma_created_5d6c1e_idx'),
                    models.Index(fields=['command'], name='bands_runma_command_8b2f40_idx'),
                ],
            },
        ),
    ]
