from django import forms

from .choices import Model, RunMode
from .conf import get_setting
from .exceptions import KnotBandsError
from .twister import TwisterSpec


def _complex(value):
    """Комплексное число из [re, im], числа или строки вида '1+0.5j'"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise forms.ValidationError('Комплексное число задаётся парой [re, im]')
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(' ', ''))
        except ValueError:
            raise forms.ValidationError(f'Не удалось разобрать число: {value}')
    return complex(value)


def parse_harmonics(value):
    if isinstance(value, str):
        value = [part for part in value.split(',') if part.strip()]
    if not isinstance(value, (list, tuple)) or not value:
        raise forms.ValidationError('Нужен непустой список гармоник')
    return tuple(_complex(item) for item in value)


class TwisterSpecForm(forms.Form):
    """Проверка описания твистера в формате {"n_bands", "m0", "harmonics"}"""
    n_bands = forms.IntegerField(label='Число зон', min_value=2)
    m0 = forms.Field(label='Коэффициент при Σ')
    harmonics = forms.Field(label='Гармоники')

    def clean_m0(self):
        return _complex(self.cleaned_data['m0'])

    def clean_harmonics(self):
        return parse_harmonics(self.cleaned_data['harmonics'])

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            cleaned_data['twister'] = TwisterSpec(
                cleaned_data['n_bands'], cleaned_data['m0'], cleaned_data['harmonics'])
        except KnotBandsError as exc:
            raise forms.ValidationError(str(exc))
        return cleaned_data


class RunConfigForm(forms.Form):
    """Параметры запуска из флагов и файла конфигурации"""
    model = forms.ChoiceField(label='Модель', choices=Model.choices, required=False)
    m0 = forms.FloatField(label='m0', required=False)
    m1 = forms.FloatField(label='m1', required=False)
    n_bands = forms.IntegerField(label='Число зон', min_value=2, required=False)
    harmonics = forms.Field(label='Гармоники', required=False)
    spec = forms.JSONField(label='Описание твистера', required=False)
    k_points = forms.IntegerField(label='Точек по k', min_value=3, required=False)
    t = forms.FloatField(label='Время эволюции', min_value=0.0, required=False)
    shots = forms.IntegerField(label='Число шотов', min_value=1, required=False)
    seed = forms.IntegerField(label='Зерно генератора', min_value=0, required=False)
    exact = forms.BooleanField(label='Точные вероятности', required=False)
    out = forms.CharField(label='Каталог результатов', required=False)
    workers = forms.IntegerField(label='Число процессов', min_value=1, required=False)

    def clean_harmonics(self):
        value = self.cleaned_data.get('harmonics')
        if value in (None, '', []):
            return None
        return parse_harmonics(value)

    def clean_t(self):
        t = self.cleaned_data.get('t')
        if t is not None and t <= 0:
            raise forms.ValidationError('Время эволюции должно быть положительным')
        return t

    def _twister(self, data):
        spec = data.get('spec')
        if spec:
            if not isinstance(spec, dict):
                raise forms.ValidationError('spec должен быть объектом')
            form = TwisterSpecForm(spec)
            if not form.is_valid():
                raise forms.ValidationError(form.errors.as_text())
            return form.cleaned_data['twister']

        model = data.get('model') or Model.TWO_BAND
        if model == Model.CUSTOM:
            if not data.get('n_bands') or not data.get('harmonics'):
                raise forms.ValidationError('Для модели custom нужны n_bands и harmonics')
            # m0 задаёт коэффициент i·m0 так же, как в стандартных моделях
            m0 = 1j * (data.get('m0') or 0.0)
            try:
                return TwisterSpec(data['n_bands'], m0, data['harmonics'])
            except KnotBandsError as exc:
                raise forms.ValidationError(str(exc))

        if data.get('m0') is None or data.get('m1') is None:
            raise forms.ValidationError('Укажите m0 и m1')
        if model == Model.FOUR_BAND:
            return TwisterSpec.four_band(data['m0'], data['m1'])
        return TwisterSpec.two_band(data['m0'], data['m1'])

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        cleaned_data['twister'] = self._twister(cleaned_data)
        if cleaned_data.get('k_points') is None:
            cleaned_data['k_points'] = get_setting('K_POINTS')
        if cleaned_data.get('shots') is None:
            cleaned_data['shots'] = get_setting('SHOTS')
        if cleaned_data.get('seed') is None:
            cleaned_data['seed'] = get_setting('SEED')
        cleaned_data['mode'] = RunMode.EXACT if cleaned_data.get('exact') else RunMode.SAMPLED
        return cleaned_data
